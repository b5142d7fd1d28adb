/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "distdf/core/kernels.hpp"
#include "test_util.hpp"

using namespace distdf;
using namespace distdf::testing;

namespace {

Table two_col_table(const std::vector<std::optional<int64_t>> &keys,
                    const std::vector<std::optional<int64_t>> &vals) {
  Table t;
  t.schema.fields = {{"k", DataType::kInt64}, {"v", DataType::kInt64}};
  t.columns = {make_int64_column(keys), make_int64_column(vals)};
  return t;
}

}  // namespace

TEST_CASE("hash_partition p=1 is identity") {
  Table t = two_col_table({1, 2, 3}, {4, 5, 6});
  auto res = hash_partition(t, {0}, 1);
  REQUIRE(res.ok());
  REQUIRE(res.value().size() == 1);
  CHECK(res.value()[0] == t);
}

TEST_CASE("hash_partition identity hash places keys mod p") {
  Table t = two_col_table({0, 1, 2, 3}, {10, 11, 12, 13});
  auto res = hash_partition(t, {0}, 2, HashMode::kIdentity);
  REQUIRE(res.ok());
  const auto &parts = res.value();
  REQUIRE(parts.size() == 2);
  REQUIRE(parts[0].num_rows() == 2);
  CHECK(parts[0].columns[0].int64_at(0) == 0);
  CHECK(parts[0].columns[0].int64_at(1) == 2);
  REQUIRE(parts[1].num_rows() == 2);
  CHECK(parts[1].columns[0].int64_at(0) == 1);
  CHECK(parts[1].columns[0].int64_at(1) == 3);
}

TEST_CASE("hash_partition completeness on random rows") {
  Rng rng(7);
  std::vector<std::optional<int64_t>> keys, vals;
  std::uniform_int_distribution<int64_t> d(-50, 50);
  for (int i = 0; i < 1000; i++) {
    keys.push_back(d(rng));
    vals.push_back(d(rng));
  }
  keys[17] = std::nullopt;  // null keys partition on the fixed sentinel
  Table t = two_col_table(keys, vals);
  auto res = hash_partition(t, {0}, 4);
  REQUIRE(res.ok());
  auto merged = concat_tables(res.value());
  REQUIRE(merged.ok());
  CHECK(tables_equal_as_multisets(merged.value(), t));
}

TEST_CASE("hash_partition is deterministic per key") {
  Table t = two_col_table({42, 42, 42}, {1, 2, 3});
  for (int64_t p : {2, 3, 7}) {
    auto res = hash_partition(t, {0}, p);
    REQUIRE(res.ok());
    int nonempty = 0;
    for (const auto &part : res.value()) {
      if (part.num_rows() > 0) {
        nonempty++;
        CHECK(part.num_rows() == 3);
      }
    }
    CHECK(nonempty == 1);
  }
}

TEST_CASE("hash_partition rejects bad key index") {
  Table t = two_col_table({1}, {2});
  auto res = hash_partition(t, {5}, 2);
  REQUIRE(!res.ok());
  CHECK(res.status().code() == Code::kInvalidArgument);
}

TEST_CASE("local_join single match") {
  Table l = two_col_table({1, 2}, {10, 20});
  Table r = two_col_table({2, 3}, {200, 300});
  auto res = local_join(l, r, {0}, {0});
  REQUIRE(res.ok());
  const Table &j = res.value();
  REQUIRE(j.num_rows() == 1);
  REQUIRE(j.num_cols() == 3);
  CHECK(j.schema.field(2).name == "v_r");
  CHECK(j.columns[0].int64_at(0) == 2);
  CHECK(j.columns[1].int64_at(0) == 20);
  CHECK(j.columns[2].int64_at(0) == 200);
}

TEST_CASE("local_join duplicate keys produce the cross product") {
  Table l = two_col_table({1, 1}, {10, 11});
  Table r = two_col_table({1, 1}, {100, 101});
  auto res = local_join(l, r, {0}, {0});
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 4);
}

TEST_CASE("local_join with an empty side yields empty joined schema") {
  Table l = two_col_table({}, {});
  Table r = two_col_table({1}, {2});
  auto res = local_join(l, r, {0}, {0});
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 0);
  CHECK(res.value().num_cols() == 3);
}

TEST_CASE("local_join null keys match nothing") {
  Table l = two_col_table({std::nullopt, 1}, {10, 11});
  Table r = two_col_table({std::nullopt, 1}, {100, 101});
  auto res = local_join(l, r, {0}, {0});
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 1);
}

TEST_CASE("local_join rejects key dtype mismatch") {
  Table l = two_col_table({1}, {2});
  Table r;
  r.schema.fields = {{"k", DataType::kUtf8}};
  r.columns = {make_utf8_column({std::string("x")})};
  auto res = local_join(l, r, {0}, {0});
  REQUIRE(!res.ok());
  CHECK(res.status().code() == Code::kInvalidArgument);
}

TEST_CASE("local_join matches the nested-loop oracle on small fuzzed tables") {
  Rng rng(99);
  for (int it = 0; it < 60; it++) {
    std::uniform_int_distribution<int64_t> rows_d(0, 64), key_d(-4, 4);
    std::vector<std::optional<int64_t>> lk, lv, rk, rv;
    int64_t ln = rows_d(rng), rn = rows_d(rng);
    for (int64_t i = 0; i < ln; i++) {
      lk.push_back(rng() % 8 == 0 ? std::optional<int64_t>{} : std::optional<int64_t>{key_d(rng)});
      lv.push_back(key_d(rng));
    }
    for (int64_t i = 0; i < rn; i++) {
      rk.push_back(rng() % 8 == 0 ? std::optional<int64_t>{} : std::optional<int64_t>{key_d(rng)});
      rv.push_back(key_d(rng));
    }
    Table l = two_col_table(lk, lv), r = two_col_table(rk, rv);
    auto res = local_join(l, r, {0}, {0});
    REQUIRE(res.ok());

    // nested-loop oracle over valid keys
    std::multiset<std::string> expected;
    for (int64_t i = 0; i < ln; i++) {
      if (!lk[static_cast<size_t>(i)]) continue;
      for (int64_t j = 0; j < rn; j++) {
        if (!rk[static_cast<size_t>(j)]) continue;
        if (*lk[static_cast<size_t>(i)] != *rk[static_cast<size_t>(j)]) continue;
        expected.insert(oracle_cell(l.columns[0], i) + "|" + oracle_cell(l.columns[1], i) + "|" +
                        oracle_cell(r.columns[1], j));
      }
    }
    std::multiset<std::string> actual;
    for (int64_t i = 0; i < res.value().num_rows(); i++) {
      actual.insert(oracle_row_all(res.value(), i));
    }
    std::multiset<std::string> expected_with_sep;
    for (const auto &e : expected) expected_with_sep.insert(e + "|");
    CHECK(actual == expected_with_sep);
  }
}

TEST_CASE("local_groupby sum over two groups") {
  Table t;
  t.schema.fields = {{"k", DataType::kUtf8}, {"v", DataType::kInt64}};
  t.columns = {make_utf8_column({std::string("a"), std::string("a"), std::string("b")}),
               make_int64_column({1, 2, 3})};
  auto res = local_groupby(t, {0}, {{1, AggOp::kSum}});
  REQUIRE(res.ok());
  const Table &g = res.value();
  REQUIRE(g.num_rows() == 2);
  CHECK(g.schema.field(1).name == "v_sum");
  CHECK(g.columns[0].utf8_at(0) == "a");
  CHECK(g.columns[1].int64_at(0) == 3);
  CHECK(g.columns[0].utf8_at(1) == "b");
  CHECK(g.columns[1].int64_at(1) == 3);
}

TEST_CASE("local_groupby std of single group is 1.0") {
  Table t = two_col_table({7, 7, 7}, {1, 2, 3});
  auto res = local_groupby(t, {0}, {{1, AggOp::kStd}}, 1);
  REQUIRE(res.ok());
  REQUIRE(res.value().num_rows() == 1);
  CHECK(res.value().columns[1].float64_at(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("local_groupby matches brute-force oracle on 10k rows") {
  Rng rng(1234);
  std::uniform_int_distribution<int64_t> key_d(0, 200);
  std::uniform_real_distribution<double> val_d(-10, 10);
  Int64Builder kb;
  Float64Builder vb;
  for (int i = 0; i < 10000; i++) {
    kb.append(key_d(rng));
    if (rng() % 13 == 0) vb.append_null(); else vb.append(val_d(rng));
  }
  Table t;
  t.schema.fields = {{"k", DataType::kInt64}, {"v", DataType::kFloat64}};
  t.columns = {kb.finish(), vb.finish()};

  auto res = local_groupby(
      t, {0}, {{1, AggOp::kSum}, {1, AggOp::kCount}, {1, AggOp::kMean}, {1, AggOp::kStd},
               {1, AggOp::kMin}, {1, AggOp::kMax}}, 1);
  REQUIRE(res.ok());
  const Table &g = res.value();

  auto oracle = oracle_group(t, {0}, 1);
  REQUIRE(g.num_rows() == static_cast<int64_t>(oracle.size()));
  for (int64_t r = 0; r < g.num_rows(); r++) {
    const auto &stats = oracle.at(oracle_row(g, r, {0}));
    CHECK(approx_rel(g.columns[1].float64_at(r), stats.sum()));
    CHECK(g.columns[2].int64_at(r) == stats.count());
    if (stats.count() == 0) {
      CHECK(!g.columns[3].is_valid(r));
    } else {
      CHECK(approx_rel(g.columns[3].float64_at(r), stats.mean()));
      CHECK(approx_rel(g.columns[5].float64_at(r), stats.min()));
      CHECK(approx_rel(g.columns[6].float64_at(r), stats.max()));
    }
    if (stats.count() <= 1) {
      CHECK(!g.columns[4].is_valid(r));
    } else {
      CHECK(approx_rel(g.columns[4].float64_at(r), stats.stddev(1)));
    }
  }
}

TEST_CASE("local_groupby rejects non-numeric aggregate") {
  Table t;
  t.schema.fields = {{"k", DataType::kInt64}, {"s", DataType::kUtf8}};
  t.columns = {make_int64_column({1}), make_utf8_column({std::string("x")})};
  auto res = local_groupby(t, {0}, {{1, AggOp::kSum}});
  REQUIRE(!res.ok());
  CHECK(res.status().code() == Code::kInvalidArgument);
}

TEST_CASE("combine_partials emits (sum, sumsq, count)") {
  Table t = two_col_table({1, 1}, {1, 2});
  auto res = combine_partials(t, {0}, {1});
  REQUIRE(res.ok());
  const Table &p = res.value();
  REQUIRE(p.num_rows() == 1);
  REQUIRE(p.num_cols() == 4);
  CHECK(p.schema.field(1).name == "v_sum");
  CHECK(p.schema.field(2).name == "v_sumsq");
  CHECK(p.schema.field(3).name == "v_count");
  CHECK(p.columns[1].int64_at(0) == 3);
  CHECK(p.columns[2].float64_at(0) == doctest::Approx(5.0));
  CHECK(p.columns[3].int64_at(0) == 2);
}

TEST_CASE("merge_partials adds triples componentwise") {
  Table partials;
  partials.schema.fields = {{"k", DataType::kInt64},
                            {"v_sum", DataType::kInt64},
                            {"v_sumsq", DataType::kFloat64},
                            {"v_count", DataType::kInt64}};
  partials.columns = {make_int64_column({1, 1}), make_int64_column({3, 3}),
                      make_float64_column({5.0, 9.0}), make_int64_column({2, 1})};
  auto res = merge_partials(partials, 1);
  REQUIRE(res.ok());
  const Table &m = res.value();
  REQUIRE(m.num_rows() == 1);
  CHECK(m.columns[1].int64_at(0) == 6);
  CHECK(m.columns[2].float64_at(0) == doctest::Approx(14.0));
  CHECK(m.columns[3].int64_at(0) == 3);
}

TEST_CASE("finalize_partials closed-form mean and std") {
  Table partials;
  partials.schema.fields = {{"k", DataType::kInt64},
                            {"v_sum", DataType::kInt64},
                            {"v_sumsq", DataType::kFloat64},
                            {"v_count", DataType::kInt64}};
  partials.columns = {make_int64_column({1, 2}), make_int64_column({3, 4}),
                      make_float64_column({5.0, 16.0}), make_int64_column({2, 1})};
  auto res = finalize_partials(partials, 1, 1);
  REQUIRE(res.ok());
  const Table &f = res.value();
  // columns: k, v_sum, v_count, v_mean, v_std
  CHECK(f.columns[3].float64_at(0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.columns[4].float64_at(0) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(!f.columns[4].is_valid(1));  // n == 1, ddof == 1 -> null std
}

TEST_CASE("finalize_partials n=0 group yields null mean") {
  Table partials;
  partials.schema.fields = {{"k", DataType::kInt64},
                            {"v_sum", DataType::kInt64},
                            {"v_sumsq", DataType::kFloat64},
                            {"v_count", DataType::kInt64}};
  partials.columns = {make_int64_column({1}), make_int64_column({0}),
                      make_float64_column({0.0}), make_int64_column({0})};
  auto res = finalize_partials(partials, 1, 1);
  REQUIRE(res.ok());
  CHECK(!res.value().columns[3].is_valid(0));
  CHECK(!res.value().columns[4].is_valid(0));
}

TEST_CASE("combine-merge-finalize agrees with local_groupby on random splits") {
  Rng rng(555);
  std::uniform_int_distribution<int64_t> key_d(0, 30);
  std::uniform_real_distribution<double> val_d(-5, 5);
  Int64Builder kb;
  Float64Builder vb;
  for (int i = 0; i < 2000; i++) {
    kb.append(key_d(rng));
    if (rng() % 11 == 0) vb.append_null(); else vb.append(val_d(rng));
  }
  Table whole;
  whole.schema.fields = {{"k", DataType::kInt64}, {"v", DataType::kFloat64}};
  whole.columns = {kb.finish(), vb.finish()};

  // random 4-way split
  std::vector<std::vector<int64_t>> split(4);
  for (int64_t r = 0; r < whole.num_rows(); r++) split[rng() % 4].push_back(r);
  std::vector<Table> partials;
  for (const auto &rows : split) {
    auto part = take(whole, rows);
    REQUIRE(part.ok());
    auto p = combine_partials(part.value(), {0}, {1});
    REQUIRE(p.ok());
    partials.push_back(p.take());
  }
  auto merged_in = concat_tables(partials);
  REQUIRE(merged_in.ok());
  auto merged = merge_partials(merged_in.value(), 1);
  REQUIRE(merged.ok());
  auto fin = finalize_partials(merged.value(), 1, 1);
  REQUIRE(fin.ok());

  auto direct = local_groupby(
      whole, {0}, {{1, AggOp::kSum}, {1, AggOp::kCount}, {1, AggOp::kMean}, {1, AggOp::kStd}}, 1);
  REQUIRE(direct.ok());

  // align by key
  const Table &f = fin.value();
  const Table &d = direct.value();
  REQUIRE(f.num_rows() == d.num_rows());
  std::map<int64_t, int64_t> d_row_of;
  for (int64_t r = 0; r < d.num_rows(); r++) d_row_of[d.columns[0].int64_at(r)] = r;
  for (int64_t r = 0; r < f.num_rows(); r++) {
    int64_t dr = d_row_of.at(f.columns[0].int64_at(r));
    CHECK(approx_rel(f.columns[1].float64_at(r), d.columns[1].float64_at(dr)));
    CHECK(f.columns[2].int64_at(r) == d.columns[2].int64_at(dr));
    if (d.columns[3].is_valid(dr)) {
      CHECK(approx_rel(f.columns[3].float64_at(r), d.columns[3].float64_at(dr)));
    } else {
      CHECK(!f.columns[3].is_valid(r));
    }
    if (d.columns[4].is_valid(dr)) {
      CHECK(approx_rel(f.columns[4].float64_at(r), d.columns[4].float64_at(dr)));
    } else {
      CHECK(!f.columns[4].is_valid(r));
    }
  }
}

TEST_CASE("column_reduce skips nulls") {
  Column c = make_int64_column({1, 2, std::nullopt, 3});
  auto sum = column_reduce(c, ReduceKind::kSum);
  REQUIRE(sum.ok());
  CHECK(sum.value().as_int64() == 6);
  auto count = column_reduce(c, ReduceKind::kCount);
  REQUIRE(count.ok());
  CHECK(count.value().as_int64() == 3);
}

TEST_CASE("column_reduce on empty column") {
  Column c = make_int64_column({});
  auto mn = column_reduce(c, ReduceKind::kMin);
  REQUIRE(mn.ok());
  CHECK(!mn.value().valid);
  auto sum = column_reduce(c, ReduceKind::kSum);
  REQUIRE(sum.ok());
  CHECK(sum.value().valid);
  CHECK(sum.value().as_int64() == 0);
  auto count = column_reduce(c, ReduceKind::kCount);
  REQUIRE(count.ok());
  CHECK(count.value().as_int64() == 0);
}

TEST_CASE("column_reduce million-row sum matches sequential oracle") {
  Rng rng(31337);
  Int64Builder b;
  int64_t expected = 0;
  std::uniform_int_distribution<int64_t> d(-1'000'000, 1'000'000);
  for (int i = 0; i < 1'000'000; i++) {
    int64_t v = d(rng);
    expected += v;
    b.append(v);
  }
  auto res = column_reduce(b.finish(), ReduceKind::kSum);
  REQUIRE(res.ok());
  CHECK(res.value().as_int64() == expected);
}

TEST_CASE("column_reduce rejects non-numeric sum") {
  Column c = make_utf8_column({std::string("a")});
  auto res = column_reduce(c, ReduceKind::kSum);
  REQUIRE(!res.ok());
  CHECK(res.status().code() == Code::kInvalidArgument);
}

TEST_CASE("local_sort orders keys with nulls last") {
  Table t = two_col_table({3, std::nullopt, 1, 2}, {0, 1, 2, 3});
  auto res = local_sort(t, {0});
  REQUIRE(res.ok());
  const Table &s = res.value();
  CHECK(s.columns[0].int64_at(0) == 1);
  CHECK(s.columns[0].int64_at(1) == 2);
  CHECK(s.columns[0].int64_at(2) == 3);
  CHECK(!s.columns[0].is_valid(3));
}

TEST_CASE("local_sort is idempotent and stable") {
  Rng rng(24);
  for (int it = 0; it < 20; it++) {
    Table t = fuzz_table(rng, 4, 48);
    if (t.num_cols() == 0) continue;
    auto once = local_sort(t, {0});
    REQUIRE(once.ok());
    auto twice = local_sort(once.value(), {0});
    REQUIRE(twice.ok());
    CHECK(once.value() == twice.value());
    CHECK(tables_equal_as_multisets(t, once.value()));
  }
}

TEST_CASE("local_sort is stable within equal keys") {
  Table t = two_col_table({1, 1, 0, 1}, {10, 11, 12, 13});
  auto res = local_sort(t, {0});
  REQUIRE(res.ok());
  const Table &s = res.value();
  CHECK(s.columns[1].int64_at(0) == 12);
  CHECK(s.columns[1].int64_at(1) == 10);
  CHECK(s.columns[1].int64_at(2) == 11);
  CHECK(s.columns[1].int64_at(3) == 13);
}

TEST_CASE("local_unique keeps first occurrence") {
  Table t = two_col_table({1, 2, 1, 3, 2}, {10, 20, 30, 40, 50});
  auto res = local_unique(t, {0});
  REQUIRE(res.ok());
  REQUIRE(res.value().num_rows() == 3);
  CHECK(res.value().columns[1].int64_at(0) == 10);
  CHECK(res.value().columns[1].int64_at(1) == 20);
  CHECK(res.value().columns[1].int64_at(2) == 40);
}

TEST_CASE("union of identical tables is the distinct rows") {
  Table t = two_col_table({1, 1, 2}, {5, 5, 6});
  auto res = row_set_op(t, t, SetOpKind::kUnion);
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 2);
}

TEST_CASE("difference against empty equals distinct rows, brute-force checked") {
  Rng rng(77);
  for (int it = 0; it < 20; it++) {
    std::vector<std::optional<int64_t>> k, v;
    std::uniform_int_distribution<int64_t> d(0, 5);
    int64_t n = rng() % 40;
    for (int64_t i = 0; i < n; i++) {
      k.push_back(d(rng));
      v.push_back(d(rng));
    }
    Table t = two_col_table(k, v);
    Table empty = two_col_table({}, {});
    auto res = row_set_op(t, empty, SetOpKind::kDifference);
    REQUIRE(res.ok());
    std::set<std::string> brute;
    for (int64_t i = 0; i < t.num_rows(); i++) brute.insert(oracle_row_all(t, i));
    std::set<std::string> actual;
    for (int64_t i = 0; i < res.value().num_rows(); i++) {
      actual.insert(oracle_row_all(res.value(), i));
    }
    CHECK(actual == brute);
    CHECK(res.value().num_rows() == static_cast<int64_t>(brute.size()));
  }
}

TEST_CASE("difference of a table with itself is empty") {
  Table t = two_col_table({1, 2}, {3, 4});
  auto res = row_set_op(t, t, SetOpKind::kDifference);
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 0);
}

TEST_CASE("set ops reject schema mismatch") {
  Table l = two_col_table({1}, {2});
  Table r;
  r.schema.fields = {{"k", DataType::kInt64}};
  r.columns = {make_int64_column({1})};
  auto res = row_set_op(l, r, SetOpKind::kUnion);
  REQUIRE(!res.ok());
  CHECK(res.status().code() == Code::kInvalidArgument);
}

TEST_CASE("concat stacks rows and validates schema") {
  Table a = two_col_table({1}, {2});
  Table b = two_col_table({3}, {4});
  auto res = concat_tables({a, b});
  REQUIRE(res.ok());
  CHECK(res.value().num_rows() == 2);
  Table odd;
  odd.schema.fields = {{"x", DataType::kInt64}};
  odd.columns = {make_int64_column({9})};
  auto bad = concat_tables({a, odd});
  CHECK(!bad.ok());
}
