#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forte::bom {

// Whole micro-dollars.
using Money = std::int64_t;
inline constexpr Money kMicrosPerDollar = 1'000'000;

// units / 10^scale, exact.
struct Decimal {
  std::int64_t units = 0;
  int scale = 0;

  double to_double() const;
  bool operator==(const Decimal&) const = default;
};

// Plain decimal literal such as "181.25" or "-3". Throws Error(kParse).
Decimal parse_decimal(std::string_view text);

// Dollar amount with at most six decimals. Throws Error(kParse).
Money parse_money(std::string_view text);

// "5310.01375" style: fixed point, trailing zeros trimmed to `min_decimals`.
std::string format_money(Money m, int min_decimals = 2);

// Exact text of a decimal, keeping its scale ("2.50" stays "2.50").
std::string format_decimal(const Decimal& d);

// quantity * unit, exact. Throws Error(kParse) if the product needs more
// than six decimals.
Money line_total(const Decimal& quantity, Money unit_cost);

struct BomLine {
  std::string category;
  std::string item;
  Decimal quantity;
  Money unit_cost = 0;
  Money line_total = 0;
  std::optional<Money> listed_total;  // from the file, if given
  int source_line = 0;                // 1-based line in the file
};

struct BillOfMaterials {
  std::vector<BomLine> lines;
  int batch_size = 1;
};

// Rows may carry a listed total differing from quantity * unit by at most
// this much; more raises Error(kBomMismatch).
inline constexpr Money kLineTolerance = 100;  // $0.0001

// CSV with header `category,item,quantity,unit_usd` and an optional
// `total_usd` column. A `# batch_size: N` comment sets the batch.
BillOfMaterials parse_bom(std::string_view csv, std::string_view source_name = "<bom>");
BillOfMaterials load_bom(const std::filesystem::path& path);

Money batch_total(const BillOfMaterials& bom);

// Batch total / batch size rounded half-up to a micro-dollar.
Money per_arm_cost(const BillOfMaterials& bom);

// True when per_arm_cost(bom) * batch_size reproduces batch_total.
bool per_arm_exact(const BillOfMaterials& bom);

// Category subtotals in first-appearance order.
std::vector<std::pair<std::string, Money>> category_subtotals(const BillOfMaterials& bom);

// First line whose item contains `needle` (case-sensitive).
const BomLine* find_line(const BillOfMaterials& bom, std::string_view needle);

// ceil(grams_per_arm * batch / spool_grams). Throws Error(kValidation)
// unless every input is positive.
long long filament_spools(double grams_per_arm, int batch, double spool_grams);

struct CableBudget {
  double millimetres = 0.0;
  double feet = 0.0;
};

CableBudget cable_budget(const std::vector<double>& per_arm_lengths_mm, int batch);

}  // namespace forte::bom
