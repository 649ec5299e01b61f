#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "forte/bom.hpp"
#include "forte/error.hpp"
#include "forte/prototype.hpp"
#include "test_support.hpp"

namespace forte {
namespace {

using namespace bom;

const BillOfMaterials& shipped() {
  static const BillOfMaterials b = load_bom(test::data_path("tables/forte_bom.csv"));
  return b;
}

TEST(Bom, ShippedFileLoads) {
  EXPECT_EQ(shipped().batch_size, 25);
  EXPECT_EQ(shipped().lines.size(), 31u);
}

TEST(Bom, StepperMotorLine) {
  const BomLine* l = find_line(shipped(), "Nema 17");
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->line_total, parse_money("1120.00"));
  EXPECT_EQ(l->quantity, (Decimal{100, 0}));
}

TEST(Bom, CableLine) {
  const BomLine* l = find_line(shipped(), "Steel cables");
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->line_total, 563'687'500);
}

TEST(Bom, BatchAndPerArm) {
  EXPECT_EQ(batch_total(shipped()), 5'310'013'750);
  EXPECT_EQ(per_arm_cost(shipped()), 212'400'550);
  EXPECT_TRUE(per_arm_exact(shipped()));
  EXPECT_EQ(per_arm_cost(shipped()) * shipped().batch_size, batch_total(shipped()));
  EXPECT_EQ(format_money(batch_total(shipped())), "5310.01375");
}

TEST(Bom, IndependentHandSum) {
  // Re-sum the file with a separate naive reader using integer cents * 10^4.
  std::ifstream in(test::data_path("tables/forte_bom.csv"));
  std::string line;
  long long micro = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto last = line.rfind(',');
    const std::string total = line.substr(last + 1);
    const auto dot = total.find('.');
    std::string frac = dot == std::string::npos ? "" : total.substr(dot + 1);
    frac.resize(6, '0');
    micro += std::stoll(total.substr(0, dot)) * 1'000'000 + std::stoll(frac);
  }
  EXPECT_EQ(micro, batch_total(shipped()));
}

TEST(Bom, CategorySubtotalsSumToTotal) {
  Money sum = 0;
  for (const auto& [cat, m] : category_subtotals(shipped())) sum += m;
  EXPECT_EQ(sum, batch_total(shipped()));
  EXPECT_EQ(category_subtotals(shipped()).front().first, "Mechanical Components");
}

TEST(Bom, TamperedLineIsRejected) {
  try {
    parse_bom("category,item,quantity,unit_usd,total_usd\nMisc,Widget,2,3,7\n", "t.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBomMismatch);
    EXPECT_NE(std::string(e.what()).find("t.csv:2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Widget"), std::string::npos);
  }
}

TEST(Bom, TamperedShippedFileIsRejected) {
  std::ifstream in(test::data_path("tables/forte_bom.csv"));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const auto pos = text.find("1120");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 4, "1121");
  EXPECT_THROW(parse_bom(text), Error);
}

TEST(Bom, LineToleranceIsOneHundredthOfACent) {
  EXPECT_NO_THROW(parse_bom("category,item,quantity,unit_usd,total_usd\nA,B,3,0.33333,0.9999\n"));
  EXPECT_THROW(parse_bom("category,item,quantity,unit_usd,total_usd\nA,B,3,0.33333,0.9998\n"), Error);
}

TEST(Bom, EmptyBom) {
  const auto b = parse_bom("category,item,quantity,unit_usd\n");
  EXPECT_EQ(batch_total(b), 0);
  EXPECT_EQ(per_arm_cost(b), 0);
}

TEST(Bom, QuotedFields) {
  const auto b = parse_bom("category,item,quantity,unit_usd\n\"Nuts, bolts\",\"M3 \"\"nyloc\"\"\",4,0.25\n");
  ASSERT_EQ(b.lines.size(), 1u);
  EXPECT_EQ(b.lines[0].category, "Nuts, bolts");
  EXPECT_EQ(b.lines[0].item, "M3 \"nyloc\"");
  EXPECT_EQ(b.lines[0].line_total, 1'000'000);
}

TEST(Bom, ParseErrors) {
  EXPECT_THROW(parse_bom("category,item,quantity,unit_usd\nA,B,x,1\n"), Error);
  EXPECT_THROW(parse_bom("category,item,quantity\nA,B,1\n"), Error);
  EXPECT_THROW(parse_bom("category,item,quantity,unit_usd\nA,B,1\n"), Error);
  EXPECT_THROW(parse_bom("# batch_size: 0\ncategory,item,quantity,unit_usd\n"), Error);
  EXPECT_THROW(parse_money("0.0000001"), Error);
  EXPECT_THROW(load_bom("/nonexistent.csv"), Error);
}

TEST(Bom, ExactDecimals) {
  EXPECT_EQ(parse_decimal("181.25"), (Decimal{18125, 2}));
  EXPECT_EQ(format_decimal(parse_decimal("2.50")), "2.50");
  EXPECT_EQ(line_total(parse_decimal("181.25"), parse_money("3.11")), 563'687'500);
  EXPECT_EQ(format_money(parse_money("0.0788")), "0.0788");
  EXPECT_EQ(format_money(parse_money("12")), "12.00");
  // 0.1 + 0.2 is exact here.
  EXPECT_EQ(parse_money("0.1") + parse_money("0.2"), parse_money("0.3"));
}

TEST(Bom, FilamentSpools) {
  EXPECT_EQ(filament_spools(1080.21, 25, 1000), 28);
  EXPECT_EQ(filament_spools(1000, 1, 1000), 1);
  EXPECT_EQ(filament_spools(500, 2, 1000), 1);
  EXPECT_THROW(filament_spools(0, 1, 1000), Error);
}

TEST(Bom, ShippedSpoolCountDiffersFromCeiling) {
  const BomLine* l = find_line(shipped(), "spool");
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->quantity.to_double(), 27.0);
  EXPECT_EQ(filament_spools(prototype::kFilamentPerArm, 25, prototype::kSpoolMass), 28);
}

TEST(Bom, CableBudget) {
  const auto c = cable_budget({1100, 700, 400}, 25);
  EXPECT_DOUBLE_EQ(c.millimetres, 55000.0);
  EXPECT_NEAR(c.feet, 180.446, 5e-4);
  EXPECT_EQ(cable_budget({}, 25).millimetres, 0.0);
  EXPECT_THROW(cable_budget({100, -1}, 1), Error);
}

}  // namespace
}  // namespace forte
