#include "orbitlift/tables.hpp"

#include <chrono>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/invariants.hpp"

namespace orbitlift {

std::string TableRow::label() const {
  if (family == "An" || family == "Bn" || family == "Dn") return family.substr(0, 1) + std::to_string(n);
  if (n > 0) return family + "(" + std::to_string(n) + ")";
  return family;
}

TableRow compute_row(const std::string& family, int n, RowMode mode, const TableOptions& options) {
  TableRow row;
  row.family = family;
  row.n = n;
  row.mode = mode;
  row.expected = published_entry(family, n);
  if (mode == RowMode::documentation) return row;
  const auto start = std::chrono::steady_clock::now();
  try {
    const FiniteGroup group = enumerate_group(catalog(family, {n}));
    row.computed.order = group.order();
    if (mode == RowMode::computed) {
      InvariantOptions inv;
      inv.cap = (row.expected ? row.expected->d : static_cast<int>(group.order())) + options.cap_margin;
      inv.seed = options.seed;
      const InvariantSystem system = generate_invariants(group, inv);
      row.degrees = system.degrees();
      row.computed.d = system.d();
      row.computed.k = compute_k(group, irreducible_decomposition(group, 1e-8, options.seed), row.computed.d,
                                 options.seed);
      row.match = row.expected && row.computed.d == row.expected->d && row.computed.k == row.expected->k &&
                  row.computed.order == row.expected->order;
    } else {
      row.match = row.expected && row.computed.order == row.expected->order;
    }
  } catch (const Error& e) {
    row.error = e.what();
    row.match = false;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<TableRow> reflection_table(const TableOptions& options) {
  std::vector<TableRow> rows;
  rows.push_back(compute_row("An", 2, RowMode::computed, options));
  rows.push_back(compute_row("An", 3, RowMode::computed, options));
  rows.push_back(compute_row("Bn", 2, RowMode::computed, options));
  rows.push_back(compute_row("Bn", 3, RowMode::computed, options));
  rows.push_back(compute_row("Dn", 4, RowMode::computed, options));
  for (int n = 5; n <= 8; ++n) rows.push_back(compute_row("I2n", n, RowMode::computed, options));
  rows.push_back(compute_row("G2", 0, RowMode::computed, options));
  rows.push_back(compute_row("H3", 0, RowMode::computed, options));
  rows.push_back(compute_row("F4", 0, RowMode::order_only, options));
  rows.push_back(compute_row("H4", 0, RowMode::order_only, options));
  for (const char* e : {"E6", "E7", "E8"}) rows.push_back(compute_row(e, 0, RowMode::documentation, options));
  return rows;
}

std::vector<TableRow> rotation_table(const TableOptions& options) {
  std::vector<TableRow> rows;
  for (int n = 1; n <= 12; ++n) rows.push_back(compute_row("C2n", n, RowMode::computed, options));
  for (int n = 1; n <= 12; ++n) rows.push_back(compute_row("C3n", n, RowMode::computed, options));
  for (int n = 2; n <= 8; ++n) rows.push_back(compute_row("I3n", n, RowMode::computed, options));
  rows.push_back(compute_row("T", 0, RowMode::computed, options));
  rows.push_back(compute_row("W", 0, RowMode::computed, options));
  rows.push_back(compute_row("H", 0, RowMode::computed, options));
  return rows;
}

std::string table_csv(const std::vector<TableRow>& rows) {
  std::string out = "group,n,mode,d,k,order,expected_d,expected_k,expected_order,status\n";
  for (const auto& r : rows) {
    const char* mode = r.mode == RowMode::computed ? "computed" : r.mode == RowMode::order_only ? "order-only"
                                                                                                : "documentation";
    auto num = [](auto v, bool present) { return present ? std::to_string(v) : std::string(); };
    const bool full = r.mode == RowMode::computed && r.error.empty();
    const bool has_order = r.mode != RowMode::documentation && r.error.empty();
    std::string status;
    if (r.mode == RowMode::documentation) status = "not computed";
    else if (!r.error.empty()) status = "error";
    else status = r.match ? "match" : "mismatch";
    out += r.family + "," + std::to_string(r.n) + "," + mode + "," + num(r.computed.d, full) + "," +
           num(r.computed.k, full) + "," + num(r.computed.order, has_order) + "," +
           num(r.expected ? r.expected->d : 0, r.expected.has_value()) + "," +
           num(r.expected ? r.expected->k : 0, r.expected.has_value()) + "," +
           num(r.expected ? r.expected->order : 0, r.expected.has_value()) + "," + status + "\n";
  }
  return out;
}

}  // namespace orbitlift
