#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlift/grouprep.hpp"

namespace orbitlift {

enum class RowMode { computed, order_only, documentation };

struct TableRow {
  std::string family;
  int n = 0;
  RowMode mode = RowMode::computed;
  std::optional<TableEntry> expected;
  TableEntry computed;
  std::vector<int> degrees;
  bool match = false;
  std::string error;
  double seconds = 0.0;  // not written to CSV

  std::string label() const;
};

struct TableOptions {
  int cap_margin = 2;  // invariants searched up to the published d + margin
  std::uint64_t seed = 1;
};

TableRow compute_row(const std::string& family, int n, RowMode mode, const TableOptions& options = {});

// Reflection groups: A2 A3 B2 B3 D4 I2n (5..8) G2 H3, F4 and H4 order-only, E6-E8 documentation.
std::vector<TableRow> reflection_table(const TableOptions& options = {});
// C2n, C3n (n <= 12), I3n (2 <= n <= 8), T, W, H.
std::vector<TableRow> rotation_table(const TableOptions& options = {});

// group,n,mode,d,k,order,expected_d,expected_k,expected_order,status
std::string table_csv(const std::vector<TableRow>& rows);

}  // namespace orbitlift
