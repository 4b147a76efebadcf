#include "support.hpp"

#include "mtm/canon.hpp"
#include "mtm/derive.hpp"
#include "mtm/oracle.hpp"
#include "mtm/relax.hpp"

#include <doctest.h>

using namespace mtm;
using namespace mtm::testing;

namespace {

std::vector<std::string> described(const EltDocument &d)
{
	std::vector<std::string> out;
	for (const auto &u : relaxation_units(d.program))
		out.push_back(describe(u, d.labels));
	return out;
}

} // namespace

TEST_CASE("units of the stale-walk test")
{
	auto d = load_data("golden/stale_walk.elt");
	CHECK(described(d) == std::vector<std::string>{"{pte0 I1}", "{R2 ptw2}"});
	CHECK(is_minimal(*d.exec, x86t_elt()));
}

TEST_CASE("a bystander thread makes a witness non-minimal")
{
	auto d = load_data("golden/not_minimal.elt");
	auto m = x86t_elt();
	CHECK_FALSE(check(*d.exec, m).consistent);
	CHECK_FALSE(is_minimal(*d.exec, m));

	// dropping the bystander write keeps the violation
	auto units = relaxation_units(d.program);
	const RelaxationUnit *w4 = nullptr;
	for (const auto &u : units)
		if (d.labels[u.anchor] == "W4")
			w4 = &u;
	REQUIRE(w4);
	CHECK(describe(*w4, d.labels) == "{W4 db4 ptw4}");
	auto r = restrict_graph(*d.exec, removal_of(d.program, {w4}));
	CHECK(r.size() == d.program.size() - 3);
	CHECK(check_derived(r, derive_unchecked(r), m).violates("causality"));
	CHECK(is_minimal(r, m));
}

TEST_CASE("restriction drops relations touching removed events")
{
	auto d = load_data("golden/dirty_bit.elt");
	auto units = relaxation_units(d.program);
	REQUIRE(units.size() == 3);
	const auto &w3 = units[2];
	CHECK(describe(w3, d.labels) == "{W3 db3 ptw3}");
	auto rem = removal_of(d.program, {&w3});
	auto rg = restrict_graph(*d.exec, rem);
	auto rp = restrict_program(d.program, rem);
	CHECK(rg.program == rp);
	CHECK(rp.size() == 4);
	// the remaining events keep their relative order and kinds
	std::vector<EventKind> kinds;
	for (const auto &e : rp.events)
		kinds.push_back(e.kind);
	CHECK(kinds == std::vector<EventKind>{EventKind::PteWrite, EventKind::Invlpg, EventKind::UserRead,
					       EventKind::PtWalk});
	// the program left is the stale-walk test; this execution of it, whose
	// walk reads the new mapping, stays permitted
	CHECK(canonical_form(rp) == canonical_form(load_data("golden/stale_walk.elt").program));
	auto m = x86t_elt();
	CHECK(check_derived(rg, derive_unchecked(rg), m).consistent);
	CHECK(check(*d.exec, m).consistent);
}

TEST_CASE("a read whose source is removed reads the initial value")
{
	auto d = load_data("golden/sb_permitted.elt");
	auto units = relaxation_units(d.program);
	for (const auto &u : units) {
		auto rem = removal_of(d.program, {&u});
		auto rg = restrict_graph(*d.exec, rem);
		rg.rf.for_each([&](EventId a, EventId b) {
			CHECK(a < rg.size());
			CHECK(b < rg.size());
		});
		std::size_t kept_rf = 0;
		d.exec->rf.for_each([&](EventId a, EventId b) { kept_rf += rem.keep.contains(a) && rem.keep.contains(b); });
		CHECK(rg.rf.size() == kept_rf);
	}
}

TEST_CASE("rmw units drop the dependency only")
{
	auto p = parse_program(R"(elt rmw
init x -> a
thread 0
  R0: R x
  ptw0: ghost ptw R0
  W1: W x
  db1: ghost db W1
rmw R0 W1
)");
	auto units = relaxation_units(p);
	REQUIRE(units.size() == 3);
	CHECK(units[2].kind == RelaxationUnit::Kind::RemoveRmwDependency);
	CHECK(units[2].events.empty());
	auto rp = restrict_program(p, removal_of(p, {&units[2]}));
	CHECK(rp.size() == p.size());
	CHECK(rp.rmw.empty());
}

TEST_CASE("spurious Invlpgs and fences are units of their own")
{
	auto p = parse_program(R"(elt sp
init x -> a
thread 0
  I0: invlpg x
  F1: mfence
  R2: R x
  ptw2: ghost ptw R2
)");
	auto units = relaxation_units(p);
	REQUIRE(units.size() == 3);
	CHECK(units[0].kind == RelaxationUnit::Kind::RemoveSpuriousInvlpg);
	CHECK(units[1].kind == RelaxationUnit::Kind::RemoveFence);
	CHECK(units[2].events == std::vector<EventId>{2, 3});
}

TEST_CASE("MinimalityChecker agrees with is_minimal")
{
	auto m = x86t_elt();
	for (auto f : {"golden/stale_walk.elt", "golden/dirty_bit.elt", "golden/remote_stale.elt",
		       "golden/remap_sequence.elt"}) {
		auto p = load_data(f).program;
		MinimalityChecker mc(p, m);
		for (const auto &g : all_executions(p, {p.size()}))
			CHECK(mc.minimal(g) == is_minimal(g, m));
	}
}
