#include "forte/bom.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "forte/error.hpp"
#include "forte/units.hpp"

namespace forte::bom {
namespace {

__extension__ using i128 = __int128;

constexpr int kMoneyScale = 6;

std::int64_t pow10(int n) {
  std::int64_t p = 1;
  while (n-- > 0) p *= 10;
  return p;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// RFC 4180 fields of one record; quotes may wrap a field, "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quoted field");
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

}  // namespace

double Decimal::to_double() const { return static_cast<double>(units) / static_cast<double>(pow10(scale)); }

Decimal parse_decimal(std::string_view text) {
  const auto original = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Decimal d;
  bool seen_point = false;
  int digits = 0;
  for (char c : text) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      if (++digits > 18) throw Error(ErrorCode::kParse, fmt::format("too many digits in '{}'", original));
      d.units = d.units * 10 + (c - '0');
      if (seen_point) ++d.scale;
    } else {
      throw Error(ErrorCode::kParse, fmt::format("'{}' is not a decimal number", original));
    }
  }
  if (digits == 0) throw Error(ErrorCode::kParse, fmt::format("'{}' is not a decimal number", original));
  if (negative) d.units = -d.units;
  return d;
}

Money parse_money(std::string_view text) {
  const Decimal d = parse_decimal(text);
  if (d.scale > kMoneyScale) {
    throw Error(ErrorCode::kParse, fmt::format("amount '{}' is finer than a micro-dollar", trim(text)));
  }
  return d.units * pow10(kMoneyScale - d.scale);
}

std::string format_money(Money m, int min_decimals) {
  const bool negative = m < 0;
  const auto abs = static_cast<std::uint64_t>(negative ? -m : m);
  std::string frac = fmt::format("{:06d}", abs % kMicrosPerDollar);
  while (static_cast<int>(frac.size()) > min_decimals && frac.back() == '0') frac.pop_back();
  return fmt::format("{}{}{}{}", negative ? "-" : "", abs / kMicrosPerDollar, frac.empty() ? "" : ".", frac);
}

std::string format_decimal(const Decimal& d) {
  const bool negative = d.units < 0;
  const auto abs = static_cast<std::uint64_t>(negative ? -d.units : d.units);
  const auto div = static_cast<std::uint64_t>(pow10(d.scale));
  if (d.scale == 0) return fmt::format("{}{}", negative ? "-" : "", abs);
  return fmt::format("{}{}.{:0{}d}", negative ? "-" : "", abs / div, abs % div, d.scale);
}

Money line_total(const Decimal& quantity, Money unit_cost) {
  const i128 product = static_cast<i128>(quantity.units) * unit_cost;
  const i128 divisor = pow10(quantity.scale);
  if (product % divisor != 0) {
    throw Error(ErrorCode::kParse, "line total is finer than a micro-dollar");
  }
  return static_cast<Money>(product / divisor);
}

BillOfMaterials parse_bom(std::string_view csv, std::string_view source_name) {
  BillOfMaterials bom;
  std::istringstream in{std::string(csv)};
  std::string raw;
  int line_no = 0;
  std::vector<std::string> header;
  auto column = [&](std::string_view name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int c_category = -1, c_item = -1, c_qty = -1, c_unit = -1, c_total = -1;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto where = [&] { return fmt::format("{}:{}", source_name, line_no); };

    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      constexpr std::string_view key = "batch_size:";
      if (body.starts_with(key)) {
        const auto value = trim(body.substr(key.size()));
        int batch = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), batch);
        if (ec != std::errc{} || ptr != value.data() + value.size() || batch < 1) {
          throw Error(ErrorCode::kParse, fmt::format("{}: batch_size must be a positive integer", where()));
        }
        bom.batch_size = batch;
      }
      continue;
    }

    std::vector<std::string> fields;
    try {
      fields = split_csv(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, fmt::format("{}: {}", where(), e.what()));
    }

    if (header.empty()) {
      header = fields;
      c_category = column("category");
      c_item = column("item");
      c_qty = column("quantity");
      c_unit = column("unit_usd");
      c_total = column("total_usd");
      if (c_category < 0 || c_item < 0 || c_qty < 0 || c_unit < 0) {
        throw Error(ErrorCode::kParse,
                    fmt::format("{}: header must name category, item, quantity and unit_usd", where()));
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: expected {} fields, got {}", where(), header.size(), fields.size()));
    }

    BomLine l;
    l.source_line = line_no;
    l.category = fields[c_category];
    l.item = fields[c_item];
    try {
      l.quantity = parse_decimal(fields[c_qty]);
      l.unit_cost = parse_money(fields[c_unit]);
      if (l.quantity.units < 0 || l.unit_cost < 0) throw Error(ErrorCode::kParse, "negative quantity or price");
      l.line_total = line_total(l.quantity, l.unit_cost);
      if (c_total >= 0 && !fields[c_total].empty()) l.listed_total = parse_money(fields[c_total]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, fmt::format("{} ({}): {}", where(), l.item, e.what()));
    }
    if (l.listed_total && std::llabs(*l.listed_total - l.line_total) > kLineTolerance) {
      throw Error(ErrorCode::kBomMismatch,
                  fmt::format("{} ({}): listed total {} != {} x {} = {}", where(), l.item,
                              format_money(*l.listed_total), fields[c_qty], format_money(l.unit_cost),
                              format_money(l.line_total)));
    }
    bom.lines.push_back(std::move(l));
  }
  return bom;
}

BillOfMaterials load_bom(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open BOM file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_bom(buffer.str(), path.string());
}

Money batch_total(const BillOfMaterials& bom) {
  i128 sum = 0;
  for (const auto& l : bom.lines) sum += l.line_total;
  return static_cast<Money>(sum);
}

Money per_arm_cost(const BillOfMaterials& bom) {
  const Money total = batch_total(bom);
  const Money n = bom.batch_size;
  return (total + n / 2) / n;
}

bool per_arm_exact(const BillOfMaterials& bom) { return batch_total(bom) % bom.batch_size == 0; }

std::vector<std::pair<std::string, Money>> category_subtotals(const BillOfMaterials& bom) {
  std::vector<std::pair<std::string, Money>> out;
  for (const auto& l : bom.lines) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == l.category; });
    if (it == out.end()) {
      out.emplace_back(l.category, l.line_total);
    } else {
      it->second += l.line_total;
    }
  }
  return out;
}

const BomLine* find_line(const BillOfMaterials& bom, std::string_view needle) {
  for (const auto& l : bom.lines) {
    if (l.item.find(needle) != std::string::npos) return &l;
  }
  return nullptr;
}

long long filament_spools(double grams_per_arm, int batch, double spool_grams) {
  if (!(grams_per_arm > 0.0) || batch < 1 || !(spool_grams > 0.0)) {
    throw Error(ErrorCode::kValidation, "filament mass, batch and spool size must be positive");
  }
  // The relative slack absorbs representation error in exact multiples.
  const double spools = grams_per_arm * batch / spool_grams;
  return static_cast<long long>(std::ceil(spools * (1.0 - 1e-12)));
}

CableBudget cable_budget(const std::vector<double>& per_arm_lengths_mm, int batch) {
  CableBudget b;
  for (double l : per_arm_lengths_mm) {
    if (!(l > 0.0)) throw Error(ErrorCode::kValidation, fmt::format("cable length must be positive, got {}", l));
    b.millimetres += l;
  }
  b.millimetres *= batch;
  b.feet = b.millimetres / kMillimetresPerFoot;
  return b;
}

}  // namespace forte::bom
