#include "doctest.h"
#include "support/properties.hpp"

using namespace strainmix::testing;

namespace {

void require_ok(const PropertyResult& r) {
  INFO(r.first_failure);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("closed form, trial view, decomposition and oracle agree") { require_ok(check_identities(300, 1e-12)); }
TEST_CASE("refinement invariance") { require_ok(check_refinement(200, 1e-12)); }
TEST_CASE("mixture monotonicity") { require_ok(check_monotonicity(200, 1e-12)); }
TEST_CASE("relabel invariance") { require_ok(check_relabel(100, 1e-12)); }
TEST_CASE("risk scaling") { require_ok(check_scaling(200, 1e-12)); }
TEST_CASE("null-effect collapse") { require_ok(check_null_collapse(200)); }
TEST_CASE("transport divergences explain contrast changes") { require_ok(check_transport(300, 1e-9)); }
