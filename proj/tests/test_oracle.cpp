#include "support.hpp"

#include "mtm/oracle.hpp"
#include "mtm/synth.hpp"
#include "mtm/wellformed.hpp"

#include <doctest.h>

using namespace mtm;
using namespace mtm::testing;

namespace {

void cross_check(const Program &p)
{
	std::set<std::string> keys;
	std::size_t visits = 0;
	auto n = enumerate_executions(
		p,
		[&](const ExecutionGraph &g) {
			++visits;
			CHECK(validate(g).empty());
			keys.insert(exec_key(g));
			return true;
		},
		{p.size()});
	CHECK(n == visits);
	CHECK(keys.size() == visits); // each execution once
	CHECK(keys == brute_force_executions(p));
}

} // namespace

TEST_CASE("enumeration matches brute force on hand-written programs")
{
	const char *programs[] = {
		"elt a\ninit x -> a\nthread 0\n  R0: R x\n  ptw0: ghost ptw R0\n",
		"elt b\ninit x -> a\nthread 0\n  W0: W x\n  db0: ghost db W0\n  ptw0: ghost ptw W0\n"
		"thread 1\n  R1: R x\n  ptw1: ghost ptw R1\n",
		"elt c\ninit x -> a\nthread 0\n  pte0: Wpte x -> b\n  I1: invlpg x\n  R2: R x\n  ptw2: ghost ptw R2\nremap pte0 I1\n",
		"elt d\ninit x -> a\ninit y -> b\nthread 0\n  pte0: Wpte x -> b\n  I1: invlpg x\n  R2: R x\n"
		"  ptw2: ghost ptw R2\n  R3: R y\n  ptw3: ghost ptw R3\nremap pte0 I1\n",
		"elt e\ninit x -> a\nthread 0\n  R0: R x\n  ptw0: ghost ptw R0\n  R1: R x\n"
		"thread 1\n  pte2: Wpte x -> b\n  I3: invlpg x\nremap pte2 I3\n",
	};
	for (std::size_t i = 0; i + 1 < std::size(programs); ++i) {
		std::string text = programs[i];
		CAPTURE(text);
		auto d = parse_elt(text, {false});
		REQUIRE(validate_program(d.program).empty());
		cross_check(d.program);
	}
	// the last one needs a remote Invlpg to be well-formed; it is not
	auto e = parse_elt(programs[4], {false});
	CHECK_FALSE(validate_program(e.program).empty());
}

TEST_CASE("enumeration matches brute force on every small synthesis candidate")
{
	SynthConfig cfg;
	cfg.target_axiom = "sc_per_loc";
	cfg.bound = 6;
	std::size_t checked = 0;
	for_each_candidate(cfg, [&](const Program &p) {
		cross_check(p);
		++checked;
		return true;
	});
	MESSAGE(checked << " candidates cross-checked");
	CHECK(checked > 20);
}

TEST_CASE("bound and malformed programs are rejected")
{
	auto p = load_data("golden/remote_invlpg.elt").program;
	CHECK_THROWS_AS(enumerate_executions(p, [](const ExecutionGraph &) { return true; }, {4}), BoundExceeded);
	auto bad = parse_elt("elt i\ninit x -> a\nthread 0\n  R0: R x\n  ptw0: ghost ptw R0\n", {false}).program;
	bad.ghost = Relation(bad.size());
	CHECK_THROWS_AS(all_executions(bad), WellFormednessError);
}

TEST_CASE("the visitor can stop the enumeration")
{
	auto p = load_data("golden/sb_permitted.elt").program;
	std::size_t seen = 0;
	enumerate_executions(p, [&](const ExecutionGraph &) { return ++seen < 3; });
	CHECK(seen == 3);
}

TEST_CASE("classification of the golden tests")
{
	auto m = x86t_elt();
	struct Case {
		const char *file;
		bool forbidden_some;
	};
	for (auto [file, forb] : {Case{"sb_permitted", false}, Case{"stale_walk", true},
				  Case{"alias_forbidden", true}, Case{"not_minimal", true}}) {
		CAPTURE(file);
		auto p = load_data(std::string("golden/") + file + ".elt").program;
		auto c = classify(p, m, {p.size()});
		CHECK(c.permitted + c.forbidden == all_executions(p, {p.size()}).size());
		CHECK(c.permitted > 0); // every test has some legal outcome
		CHECK((c.forbidden > 0) == forb);
		for (auto &[ax, k] : c.per_axiom) {
			CHECK(k <= c.forbidden);
			CHECK(c.witness.count(ax));
		}
		CHECK(c.first_forbidden.has_value() == forb);
	}
}

TEST_CASE("single_co_pa leaves axiom verdicts unchanged for a model ignoring co_pa")
{
	auto m = x86t_elt();
	auto p = load_data("golden/remap_sequence.elt").program;
	auto full = classify(p, m, {p.size(), false});
	auto single = classify(p, m, {p.size(), true});
	CHECK(single.permitted + single.forbidden <= full.permitted + full.forbidden);
	for (auto &[ax, k] : full.per_axiom)
		CHECK((single.per_axiom[ax] > 0) == (k > 0));
}
