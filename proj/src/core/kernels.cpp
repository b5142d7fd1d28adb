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

#include "distdf/core/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace distdf {

const char *agg_op_name(AggOp op) {
  switch (op) {
    case AggOp::kSum: return "sum";
    case AggOp::kCount: return "count";
    case AggOp::kMean: return "mean";
    case AggOp::kStd: return "std";
    case AggOp::kMin: return "min";
    case AggOp::kMax: return "max";
  }
  return "?";
}

Result<std::vector<Table>> hash_partition(const Table &t, const std::vector<int64_t> &key_cols,
                                          int64_t num_partitions, HashMode mode) {
  DISTDF_RETURN_NOT_OK(check_key_cols(t, key_cols));
  if (num_partitions < 1) {
    return Status(Code::kInvalidArgument, "partition count must be >= 1");
  }
  if (num_partitions == 1) {
    return std::vector<Table>{t};
  }
  std::vector<std::vector<int64_t>> part_rows(static_cast<size_t>(num_partitions));
  for (int64_t r = 0; r < t.num_rows(); r++) {
    DISTDF_ASSIGN_OR_RAISE(uint64_t h, hash_row(t, r, key_cols, mode));
    part_rows[h % static_cast<uint64_t>(num_partitions)].push_back(r);
  }
  std::vector<Table> out;
  out.reserve(part_rows.size());
  for (const auto &rows : part_rows) {
    DISTDF_ASSIGN_OR_RAISE(Table p, take(t, rows));
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// Join output schema: all left columns, then right columns minus keys.
// Collisions on the right get "_r".
Result<Schema> join_output_schema(const Table &l, const Table &r,
                                  const std::vector<int64_t> &r_keys,
                                  std::vector<int64_t> *r_payload_cols) {
  Schema out = l.schema;
  std::unordered_set<std::string> names;
  for (const auto &f : out.fields) names.insert(f.name);
  std::unordered_set<int64_t> key_set(r_keys.begin(), r_keys.end());
  for (int64_t c = 0; c < r.num_cols(); c++) {
    if (key_set.count(c)) continue;
    Field f = r.schema.field(c);
    if (names.count(f.name)) f.name += "_r";
    if (!names.insert(f.name).second) {
      return Status(Code::kInvalidArgument, "unresolvable column name collision in join");
    }
    out.fields.push_back(std::move(f));
    r_payload_cols->push_back(c);
  }
  return out;
}

bool row_has_null_key(const Table &t, int64_t row, const std::vector<int64_t> &cols) {
  for (int64_t c : cols) {
    if (!t.columns[static_cast<size_t>(c)].is_valid(row)) return true;
  }
  return false;
}

}  // namespace

Result<Table> local_join(const Table &l, const Table &r, const std::vector<int64_t> &l_keys,
                         const std::vector<int64_t> &r_keys) {
  DISTDF_RETURN_NOT_OK(check_key_cols(l, l_keys));
  DISTDF_RETURN_NOT_OK(check_key_cols(r, r_keys));
  if (l_keys.size() != r_keys.size()) {
    return Status(Code::kInvalidArgument, "key column counts differ");
  }
  for (size_t i = 0; i < l_keys.size(); i++) {
    if (l.schema.field(l_keys[i]).dtype != r.schema.field(r_keys[i]).dtype) {
      return Status(Code::kInvalidArgument, "key dtype mismatch at position " + std::to_string(i));
    }
  }
  std::vector<int64_t> r_payload_cols;
  DISTDF_ASSIGN_OR_RAISE(Schema out_schema, join_output_schema(l, r, r_keys, &r_payload_cols));

  std::unordered_map<std::string, std::vector<int64_t>> r_index;
  for (int64_t i = 0; i < r.num_rows(); i++) {
    if (row_has_null_key(r, i, r_keys)) continue;
    r_index[row_key(r, i, r_keys)].push_back(i);
  }

  TableBuilder out(out_schema);
  int64_t n_l = l.num_cols();
  for (int64_t i = 0; i < l.num_rows(); i++) {
    if (row_has_null_key(l, i, l_keys)) continue;
    auto it = r_index.find(row_key(l, i, l_keys));
    if (it == r_index.end()) continue;
    for (int64_t j : it->second) {
      for (int64_t c = 0; c < n_l; c++) {
        out.cell_builder(c).append_cell(l.columns[static_cast<size_t>(c)], i);
      }
      for (size_t p = 0; p < r_payload_cols.size(); p++) {
        out.cell_builder(n_l + static_cast<int64_t>(p))
            .append_cell(r.columns[static_cast<size_t>(r_payload_cols[p])], j);
      }
    }
  }
  return out.finish();
}

namespace {

struct GroupIndex {
  std::unordered_map<std::string, int64_t> lookup;
  std::vector<int64_t> first_row;   // first-occurrence row per group
  std::vector<int64_t> group_of;    // group id per input row

  static GroupIndex build(const Table &t, const std::vector<int64_t> &key_cols) {
    GroupIndex g;
    g.group_of.resize(static_cast<size_t>(t.num_rows()));
    std::string key;
    for (int64_t r = 0; r < t.num_rows(); r++) {
      key.clear();
      append_row_key(t, r, key_cols, &key);
      auto [it, inserted] = g.lookup.try_emplace(key, static_cast<int64_t>(g.first_row.size()));
      if (inserted) g.first_row.push_back(r);
      g.group_of[static_cast<size_t>(r)] = it->second;
    }
    return g;
  }

  int64_t num_groups() const { return static_cast<int64_t>(first_row.size()); }
};

struct NumericAcc {
  int64_t count = 0;
  uint64_t isum = 0;  // wrapping two's-complement sum for int64 inputs
  double fsum = 0.0;
  double sumsq = 0.0;
  bool has_minmax = false;
  int64_t imin = 0, imax = 0;
  double fmin = 0.0, fmax = 0.0;
};

void accumulate(NumericAcc &acc, const Column &col, int64_t row) {
  if (!col.is_valid(row)) return;
  acc.count++;
  if (col.dtype == DataType::kInt64) {
    int64_t v = col.int64_at(row);
    acc.isum += static_cast<uint64_t>(v);
    double d = static_cast<double>(v);
    acc.fsum += d;
    acc.sumsq += d * d;
    if (!acc.has_minmax) {
      acc.imin = acc.imax = v;
      acc.has_minmax = true;
    } else {
      acc.imin = std::min(acc.imin, v);
      acc.imax = std::max(acc.imax, v);
    }
  } else {
    double v = col.float64_at(row);
    acc.fsum += v;
    acc.sumsq += v * v;
    if (!acc.has_minmax) {
      acc.fmin = acc.fmax = v;
      acc.has_minmax = true;
    } else {
      acc.fmin = std::min(acc.fmin, v);
      acc.fmax = std::max(acc.fmax, v);
    }
  }
}

double mean_of(const NumericAcc &a, DataType dtype) {
  double sum = dtype == DataType::kInt64 ? static_cast<double>(static_cast<int64_t>(a.isum))
                                         : a.fsum;
  return sum / static_cast<double>(a.count);
}

// std = sqrt((sumsq - sum^2/n) / (n - ddof)); negative radicands from float
// cancellation clamp to zero.
double std_of(const NumericAcc &a, DataType dtype, int64_t ddof) {
  double sum = dtype == DataType::kInt64 ? static_cast<double>(static_cast<int64_t>(a.isum))
                                         : a.fsum;
  double n = static_cast<double>(a.count);
  double var = (a.sumsq - sum * sum / n) / static_cast<double>(a.count - ddof);
  return std::sqrt(std::max(0.0, var));
}

Status check_agg_cols_numeric(const Table &t, const std::vector<int64_t> &cols) {
  for (int64_t c : cols) {
    if (c < 0 || c >= t.num_cols()) {
      return {Code::kInvalidArgument, "aggregate column index out of range"};
    }
    if (!is_numeric(t.schema.field(c).dtype)) {
      return {Code::kInvalidArgument,
              "aggregate column '" + t.schema.field(c).name + "' is not numeric"};
    }
  }
  return Status::OK();
}

Schema key_schema(const Table &t, const std::vector<int64_t> &key_cols) {
  Schema s;
  for (int64_t c : key_cols) s.fields.push_back(t.schema.field(c));
  return s;
}

void append_group_keys(const Table &t, const std::vector<int64_t> &key_cols,
                       const GroupIndex &groups, TableBuilder *out) {
  for (int64_t g = 0; g < groups.num_groups(); g++) {
    out->append_cells(t, groups.first_row[static_cast<size_t>(g)], key_cols);
  }
}

}  // namespace

Result<Table> local_groupby(const Table &t, const std::vector<int64_t> &key_cols,
                            const std::vector<AggSpec> &aggs, int64_t ddof) {
  DISTDF_RETURN_NOT_OK(check_key_cols(t, key_cols));
  if (ddof < 0) return Status(Code::kInvalidArgument, "ddof must be >= 0");
  std::vector<int64_t> agg_cols;
  for (const auto &a : aggs) agg_cols.push_back(a.col);
  DISTDF_RETURN_NOT_OK(check_agg_cols_numeric(t, agg_cols));

  GroupIndex groups = GroupIndex::build(t, key_cols);

  // One accumulator stream per distinct aggregate column.
  std::vector<int64_t> distinct_cols;
  std::unordered_map<int64_t, size_t> col_slot;
  for (const auto &a : aggs) {
    if (col_slot.try_emplace(a.col, distinct_cols.size()).second) {
      distinct_cols.push_back(a.col);
    }
  }
  std::vector<std::vector<NumericAcc>> accs(
      distinct_cols.size(), std::vector<NumericAcc>(static_cast<size_t>(groups.num_groups())));
  for (int64_t r = 0; r < t.num_rows(); r++) {
    int64_t g = groups.group_of[static_cast<size_t>(r)];
    for (size_t s = 0; s < distinct_cols.size(); s++) {
      accumulate(accs[s][static_cast<size_t>(g)],
                 t.columns[static_cast<size_t>(distinct_cols[s])], r);
    }
  }

  Schema out_schema = key_schema(t, key_cols);
  for (const auto &a : aggs) {
    const Field &f = t.schema.field(a.col);
    DataType out_dtype = f.dtype;
    switch (a.op) {
      case AggOp::kSum: out_dtype = f.dtype; break;
      case AggOp::kCount: out_dtype = DataType::kInt64; break;
      case AggOp::kMean:
      case AggOp::kStd: out_dtype = DataType::kFloat64; break;
      case AggOp::kMin:
      case AggOp::kMax: out_dtype = f.dtype; break;
    }
    out_schema.fields.push_back({f.name + "_" + agg_op_name(a.op), out_dtype});
  }
  DISTDF_RETURN_NOT_OK(validate_schema(out_schema));

  TableBuilder out(out_schema);
  append_group_keys(t, key_cols, groups, &out);
  int64_t col_idx = static_cast<int64_t>(key_cols.size());
  for (const auto &a : aggs) {
    const DataType dtype = t.schema.field(a.col).dtype;
    const auto &acc = accs[col_slot[a.col]];
    CellBuilder &b = out.cell_builder(col_idx++);
    for (int64_t g = 0; g < groups.num_groups(); g++) {
      const NumericAcc &ac = acc[static_cast<size_t>(g)];
      switch (a.op) {
        case AggOp::kSum:
          if (dtype == DataType::kInt64) {
            b.append_scalar(Scalar::Int64(static_cast<int64_t>(ac.isum)));
          } else {
            b.append_scalar(Scalar::Float64(ac.fsum));
          }
          break;
        case AggOp::kCount:
          b.append_scalar(Scalar::Int64(ac.count));
          break;
        case AggOp::kMean:
          if (ac.count == 0) b.append_null();
          else b.append_scalar(Scalar::Float64(mean_of(ac, dtype)));
          break;
        case AggOp::kStd:
          if (ac.count <= ddof) b.append_null();
          else b.append_scalar(Scalar::Float64(std_of(ac, dtype, ddof)));
          break;
        case AggOp::kMin:
          if (!ac.has_minmax) b.append_null();
          else if (dtype == DataType::kInt64) b.append_scalar(Scalar::Int64(ac.imin));
          else b.append_scalar(Scalar::Float64(ac.fmin));
          break;
        case AggOp::kMax:
          if (!ac.has_minmax) b.append_null();
          else if (dtype == DataType::kInt64) b.append_scalar(Scalar::Int64(ac.imax));
          else b.append_scalar(Scalar::Float64(ac.fmax));
          break;
      }
    }
  }
  return out.finish();
}

Result<Table> combine_partials(const Table &t, const std::vector<int64_t> &key_cols,
                               const std::vector<int64_t> &agg_cols) {
  DISTDF_RETURN_NOT_OK(check_key_cols(t, key_cols));
  DISTDF_RETURN_NOT_OK(check_agg_cols_numeric(t, agg_cols));

  GroupIndex groups = GroupIndex::build(t, key_cols);
  std::vector<std::vector<NumericAcc>> accs(
      agg_cols.size(), std::vector<NumericAcc>(static_cast<size_t>(groups.num_groups())));
  for (int64_t r = 0; r < t.num_rows(); r++) {
    int64_t g = groups.group_of[static_cast<size_t>(r)];
    for (size_t s = 0; s < agg_cols.size(); s++) {
      accumulate(accs[s][static_cast<size_t>(g)], t.columns[static_cast<size_t>(agg_cols[s])], r);
    }
  }

  Schema out_schema = key_schema(t, key_cols);
  for (int64_t c : agg_cols) {
    const Field &f = t.schema.field(c);
    out_schema.fields.push_back({f.name + "_sum", f.dtype});
    out_schema.fields.push_back({f.name + "_sumsq", DataType::kFloat64});
    out_schema.fields.push_back({f.name + "_count", DataType::kInt64});
  }
  DISTDF_RETURN_NOT_OK(validate_schema(out_schema));

  TableBuilder out(out_schema);
  append_group_keys(t, key_cols, groups, &out);
  int64_t col_idx = static_cast<int64_t>(key_cols.size());
  for (size_t s = 0; s < agg_cols.size(); s++) {
    const DataType dtype = t.schema.field(agg_cols[s]).dtype;
    CellBuilder &sum_b = out.cell_builder(col_idx++);
    CellBuilder &sumsq_b = out.cell_builder(col_idx++);
    CellBuilder &count_b = out.cell_builder(col_idx++);
    for (int64_t g = 0; g < groups.num_groups(); g++) {
      const NumericAcc &ac = accs[s][static_cast<size_t>(g)];
      if (dtype == DataType::kInt64) {
        sum_b.append_scalar(Scalar::Int64(static_cast<int64_t>(ac.isum)));
      } else {
        sum_b.append_scalar(Scalar::Float64(ac.fsum));
      }
      sumsq_b.append_scalar(Scalar::Float64(ac.sumsq));
      count_b.append_scalar(Scalar::Int64(ac.count));
    }
  }
  return out.finish();
}

Result<Table> merge_partials(const Table &partials, int64_t num_keys) {
  if (num_keys < 1 || num_keys >= partials.num_cols()) {
    return Status(Code::kInvalidArgument, "invalid key count for partial merge");
  }
  std::vector<int64_t> key_cols(static_cast<size_t>(num_keys));
  std::iota(key_cols.begin(), key_cols.end(), 0);
  GroupIndex groups = GroupIndex::build(partials, key_cols);

  int64_t n_val_cols = partials.num_cols() - num_keys;
  std::vector<std::vector<uint64_t>> isums;
  std::vector<std::vector<double>> fsums;
  isums.assign(static_cast<size_t>(n_val_cols),
               std::vector<uint64_t>(static_cast<size_t>(groups.num_groups()), 0));
  fsums.assign(static_cast<size_t>(n_val_cols),
               std::vector<double>(static_cast<size_t>(groups.num_groups()), 0.0));

  for (int64_t c = 0; c < n_val_cols; c++) {
    const Column &col = partials.columns[static_cast<size_t>(num_keys + c)];
    if (!is_numeric(col.dtype)) {
      return Status(Code::kInvalidArgument, "partial columns must be numeric");
    }
    for (int64_t r = 0; r < partials.num_rows(); r++) {
      if (!col.is_valid(r)) continue;
      int64_t g = groups.group_of[static_cast<size_t>(r)];
      if (col.dtype == DataType::kInt64) {
        isums[static_cast<size_t>(c)][static_cast<size_t>(g)] +=
            static_cast<uint64_t>(col.int64_at(r));
      } else {
        fsums[static_cast<size_t>(c)][static_cast<size_t>(g)] += col.float64_at(r);
      }
    }
  }

  TableBuilder out(partials.schema);
  append_group_keys(partials, key_cols, groups, &out);
  for (int64_t c = 0; c < n_val_cols; c++) {
    const DataType dtype = partials.schema.field(num_keys + c).dtype;
    CellBuilder &b = out.cell_builder(num_keys + c);
    for (int64_t g = 0; g < groups.num_groups(); g++) {
      if (dtype == DataType::kInt64) {
        b.append_scalar(Scalar::Int64(
            static_cast<int64_t>(isums[static_cast<size_t>(c)][static_cast<size_t>(g)])));
      } else {
        b.append_scalar(
            Scalar::Float64(fsums[static_cast<size_t>(c)][static_cast<size_t>(g)]));
      }
    }
  }
  return out.finish();
}

Result<Table> finalize_partials(const Table &partials, int64_t num_keys, int64_t ddof) {
  if (ddof < 0) return Status(Code::kInvalidArgument, "ddof must be >= 0");
  int64_t n_val_cols = partials.num_cols() - num_keys;
  if (num_keys < 1 || n_val_cols <= 0 || n_val_cols % 3 != 0) {
    return Status(Code::kInvalidArgument, "partials must carry (sum, sumsq, count) triples");
  }
  int64_t n_triples = n_val_cols / 3;

  Schema out_schema;
  for (int64_t k = 0; k < num_keys; k++) out_schema.fields.push_back(partials.schema.field(k));
  std::vector<std::string> bases;
  for (int64_t s = 0; s < n_triples; s++) {
    const Field &sum_f = partials.schema.field(num_keys + 3 * s);
    const std::string &n = sum_f.name;
    if (n.size() < 4 || n.substr(n.size() - 4) != "_sum") {
      return Status(Code::kInvalidArgument, "expected <col>_sum column in partials");
    }
    std::string base = n.substr(0, n.size() - 4);
    bases.push_back(base);
    out_schema.fields.push_back({base + "_sum", sum_f.dtype});
    out_schema.fields.push_back({base + "_count", DataType::kInt64});
    out_schema.fields.push_back({base + "_mean", DataType::kFloat64});
    out_schema.fields.push_back({base + "_std", DataType::kFloat64});
  }
  DISTDF_RETURN_NOT_OK(validate_schema(out_schema));

  TableBuilder out(out_schema);
  std::vector<int64_t> key_cols(static_cast<size_t>(num_keys));
  std::iota(key_cols.begin(), key_cols.end(), 0);
  for (int64_t r = 0; r < partials.num_rows(); r++) out.append_cells(partials, r, key_cols);

  for (int64_t s = 0; s < n_triples; s++) {
    const Column &sum_c = partials.columns[static_cast<size_t>(num_keys + 3 * s)];
    const Column &sumsq_c = partials.columns[static_cast<size_t>(num_keys + 3 * s + 1)];
    const Column &count_c = partials.columns[static_cast<size_t>(num_keys + 3 * s + 2)];
    CellBuilder &sum_b = out.cell_builder(num_keys + 4 * s);
    CellBuilder &count_b = out.cell_builder(num_keys + 4 * s + 1);
    CellBuilder &mean_b = out.cell_builder(num_keys + 4 * s + 2);
    CellBuilder &std_b = out.cell_builder(num_keys + 4 * s + 3);
    for (int64_t r = 0; r < partials.num_rows(); r++) {
      sum_b.append_cell(sum_c, r);
      count_b.append_cell(count_c, r);
      int64_t n = count_c.is_valid(r) ? count_c.int64_at(r) : 0;
      double sum = sum_c.dtype == DataType::kInt64 ? static_cast<double>(sum_c.int64_at(r))
                                                   : sum_c.float64_at(r);
      double sumsq = sumsq_c.float64_at(r);
      if (n == 0) {
        mean_b.append_null();
      } else {
        mean_b.append_scalar(Scalar::Float64(sum / static_cast<double>(n)));
      }
      if (n <= ddof) {
        std_b.append_null();
      } else {
        double var = (sumsq - sum * sum / static_cast<double>(n)) /
                     static_cast<double>(n - ddof);
        std_b.append_scalar(Scalar::Float64(std::sqrt(std::max(0.0, var))));
      }
    }
  }
  return out.finish();
}

Result<Scalar> column_reduce(const Column &c, ReduceKind op) {
  if (op == ReduceKind::kCount) {
    int64_t n = 0;
    for (int64_t i = 0; i < c.length; i++) {
      if (c.is_valid(i)) n++;
    }
    return Scalar::Int64(n);
  }
  if (!is_numeric(c.dtype)) {
    return Status(Code::kInvalidArgument, "reduction requires a numeric column");
  }
  NumericAcc acc;
  for (int64_t i = 0; i < c.length; i++) accumulate(acc, c, i);
  switch (op) {
    case ReduceKind::kSum:
      if (c.dtype == DataType::kInt64) return Scalar::Int64(static_cast<int64_t>(acc.isum));
      return Scalar::Float64(acc.fsum);
    case ReduceKind::kMin:
      if (!acc.has_minmax) return Scalar::Null(c.dtype);
      if (c.dtype == DataType::kInt64) return Scalar::Int64(acc.imin);
      return Scalar::Float64(acc.fmin);
    case ReduceKind::kMax:
      if (!acc.has_minmax) return Scalar::Null(c.dtype);
      if (c.dtype == DataType::kInt64) return Scalar::Int64(acc.imax);
      return Scalar::Float64(acc.fmax);
    case ReduceKind::kCount: break;
  }
  return Status(Code::kInvalidArgument, "unknown reduction");
}

Result<Table> local_sort(const Table &t, const std::vector<int64_t> &key_cols) {
  DISTDF_RETURN_NOT_OK(check_key_cols(t, key_cols));
  std::vector<int64_t> idx(static_cast<size_t>(t.num_rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int64_t a, int64_t b) {
    return compare_rows(t, a, key_cols, t, b, key_cols) < 0;
  });
  return take(t, idx);
}

Result<Table> local_unique(const Table &t, const std::vector<int64_t> &key_cols) {
  DISTDF_RETURN_NOT_OK(check_key_cols(t, key_cols));
  std::unordered_set<std::string> seen;
  std::vector<int64_t> keep;
  std::string key;
  for (int64_t r = 0; r < t.num_rows(); r++) {
    key.clear();
    append_row_key(t, r, key_cols, &key);
    if (seen.insert(key).second) keep.push_back(r);
  }
  return take(t, keep);
}

Result<Table> row_set_op(const Table &l, const Table &r, SetOpKind kind) {
  if (l.schema != r.schema) {
    return Status(Code::kInvalidArgument, "set operation requires equal schemas");
  }
  auto cols = all_column_indices(l);
  std::unordered_set<std::string> seen;
  TableBuilder out(l.schema);
  if (kind == SetOpKind::kUnion) {
    std::string key;
    for (const Table *t : {&l, &r}) {
      for (int64_t i = 0; i < t->num_rows(); i++) {
        key.clear();
        append_row_key(*t, i, cols, &key);
        if (seen.insert(key).second) out.append_row(*t, i);
      }
    }
    return out.finish();
  }
  std::unordered_set<std::string> r_rows;
  for (int64_t i = 0; i < r.num_rows(); i++) r_rows.insert(row_key(r, i, cols));
  std::string key;
  for (int64_t i = 0; i < l.num_rows(); i++) {
    key.clear();
    append_row_key(l, i, cols, &key);
    if (r_rows.count(key)) continue;
    if (seen.insert(key).second) out.append_row(l, i);
  }
  return out.finish();
}

Result<Table> concat_tables(const std::vector<Table> &tables) {
  if (tables.empty()) return Status(Code::kInvalidArgument, "concat of zero tables");
  for (size_t i = 1; i < tables.size(); i++) {
    if (tables[i].schema != tables[0].schema) {
      return Status(Code::kInvalidArgument, "concat requires equal schemas");
    }
  }
  TableBuilder out(tables[0].schema);
  for (const auto &t : tables) {
    for (int64_t r = 0; r < t.num_rows(); r++) out.append_row(t, r);
  }
  return out.finish();
}

}  // namespace distdf
