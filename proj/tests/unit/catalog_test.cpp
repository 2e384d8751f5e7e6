#include "anharm/catalog.hpp"

#include <set>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "anharm/symbols.hpp"

namespace anharm {
namespace {

TEST(Catalog, NamesAreUnique) {
  std::set<std::string> names;
  for (const auto& b : list_builtins()) EXPECT_TRUE(names.insert(b.name).second) << b.name;
  EXPECT_EQ(names.size(), 6u);
}

TEST(Catalog, ExponentsMatchListing) {
  for (const auto& b : list_builtins()) {
    const auto spec = make_builtin(b.name);
    EXPECT_DOUBLE_EQ(spec.gamma(), b.gamma) << b.name;
    EXPECT_DOUBLE_EQ(spec.kappa(), b.kappa) << b.name;
    EXPECT_EQ(spec.n(), b.n) << b.name;
    EXPECT_EQ(spec.label(), b.name);
  }
  const auto frac = make_builtin("frac-rel-1d");
  EXPECT_DOUBLE_EQ(frac.gamma(), 0.5);
  EXPECT_DOUBLE_EQ(frac.kappa(), 1.0);
  const auto quartic = make_builtin("quartic-1d");
  EXPECT_DOUBLE_EQ(quartic.gamma(), 1.0);
  EXPECT_DOUBLE_EQ(quartic.kappa(), 2.0);
}

TEST(Catalog, ParametrisedFamily) {
  const auto s = make_builtin("frac-rel-gamma", {std::nullopt, 0.75, 2.5});
  EXPECT_DOUBLE_EQ(s.gamma(), 0.75);
  EXPECT_DOUBLE_EQ(s.kappa(), 2.5);
  EXPECT_DOUBLE_EQ(make_builtin("harmonic-1d", {3.0}).q(), 3.0);
}

TEST(Catalog, EveryEntryIsAdmissible) {
  for (const auto& b : list_builtins()) {
    const auto spec = make_builtin(b.name);
    for (const TauFunction* f : {&spec.A(), &spec.V()}) {
      const auto lip = check_tau_lipschitz(*f, spec.q(), 1.0, 1000, 3);
      EXPECT_TRUE(lip.passed()) << b.name << " " << lip.condition;
      const auto cs = check_cstar(*f, 1000, 3);
      EXPECT_TRUE(cs.passed()) << b.name << " " << cs.condition;
    }
  }
}

TEST(Catalog, UnknownNameThrows) {
  EXPECT_THROW(make_builtin("anharmonic-7d"), std::invalid_argument);
  EXPECT_THROW(make_builtin(""), std::invalid_argument);
}

TEST(Catalog, JsonListing) {
  const auto j = to_json(list_builtins().front());
  EXPECT_EQ(j.at("name"), "harmonic-1d");
  EXPECT_EQ(j.at("n"), 1);
  EXPECT_TRUE(j.contains("multiplier"));
  EXPECT_TRUE(j.contains("potential"));
}

}  // namespace
}  // namespace anharm
