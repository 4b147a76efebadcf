#include "support.hpp"

#include "mtm/wellformed.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mtm;
using namespace mtm::testing;

namespace {

bool has(const std::vector<WfViolation> &v, WfRule r, const std::string &fragment = "")
{
	return std::any_of(v.begin(), v.end(), [&](const WfViolation &x) {
		return x.rule == r && x.message.find(fragment) != std::string::npos;
	});
}

ExecutionGraph exec_of(const std::string &text)
{
	auto d = parse_elt(text, {false});
	REQUIRE(d.exec);
	return *d.exec;
}

const char *stale_walk = R"(elt s
init x -> a
thread 0
  pte0: Wpte x -> b
  I1: invlpg x
  R2: R x
  ptw2: ghost ptw R2
exec
  rf_pa init R2
  rf_pa init ptw2
  rf_ptw ptw2 R2
  remap pte0 I1
)";

} // namespace

TEST_CASE("golden executions are well-formed")
{
	for (auto f : {"stale_walk", "dirty_bit", "remote_stale", "sb_permitted",
		       "alias_forbidden", "remap_sequence", "not_minimal", "remote_invlpg"}) {
		CAPTURE(f);
		auto d = read_elt_file(data_path(std::string("golden/") + f + ".elt"), {false});
		CHECK(validate_program(d.program).empty());
		REQUIRE(d.exec);
		CHECK(validate(*d.exec).empty());
	}
}

TEST_CASE("WF1: po stays on one thread and is total")
{
	auto g = exec_of(stale_walk);
	g.program.po.erase(0, 2);
	CHECK(has(validate(g), WfRule::WF1, "not transitive"));
	g = exec_of(stale_walk);
	g.program.po.insert(2, 0);
	CHECK(has(validate(g), WfRule::WF1, "both ways"));
}

TEST_CASE("WF2: addresses must be declared")
{
	auto g = exec_of(stale_walk);
	g.program.events[2].va = Va{5};
	CHECK(has(validate(g), WfRule::WF2));
}

TEST_CASE("WF3: rf and co respect locations")
{
	auto g = exec_of(R"(elt c
init x -> a
init y -> b
thread 0
  W0: W x
  db0: ghost db W0
  ptw0: ghost ptw W0
  R1: R y
  ptw1: ghost ptw R1
exec
  rf W0 R1
  rf db0 ptw0
  rf_pa init W0
  rf_pa init ptw0
  rf_pa init R1
  rf_pa init ptw1
  rf_ptw ptw0 W0
  rf_ptw ptw1 R1
)");
	CHECK(has(validate(g), WfRule::WF3, "different locations"));
	g.rf.erase(0, 3);
	CHECK(validate(g).empty());
	g.co.insert(0, 1); // user write and dirty bit write live at different locations
	CHECK(has(validate(g), WfRule::WF3, "co pair"));
}

TEST_CASE("WF4: ghosts sit with their invoker")
{
	auto g = exec_of(stale_walk);
	g.program.events[3].thread = 1;
	CHECK(has(validate(g), WfRule::WF4, "another thread"));
	g = exec_of(stale_walk);
	g.program.ghost.erase(2, 3);
	CHECK(has(validate(g), WfRule::WF4, "no invoker"));
}

TEST_CASE("WF5: every data event uses one visible walk")
{
	auto g = exec_of(stale_walk);
	g.rf_ptw.erase(3, 2);
	CHECK(has(validate(g), WfRule::WF5, "no walk"));
}

TEST_CASE("WF6: one mapping source, same VA")
{
	auto g = exec_of(stale_walk);
	g.rf_pa_init.erase(2);
	CHECK(has(validate(g), WfRule::WF6, "no mapping source"));
	g.rf_pa.insert(0, 2);
	g.rf_pa_init.insert(2);
	CHECK(has(validate(g), WfRule::WF6, "several"));
}

TEST_CASE("WF6: a dirty bit write keeps the mapping it overwrites")
{
	// db0 follows pte1 in co but W0 still uses the initial mapping.
	auto text = std::string(R"(elt d
init x -> a
thread 0
  W0: W x
  db0: ghost db W0
  ptw0: ghost ptw W0
  pte1: Wpte x -> b
  I2: invlpg x
exec
  rf db0 ptw0
  rf_pa init W0
  rf_pa init ptw0
  rf_ptw ptw0 W0
  remap pte1 I2
)");
	auto ok = exec_of(text + "  co db0 pte1\n");
	CHECK(validate(ok).empty());
	auto bad = exec_of(text + "  co pte1 db0\n");
	CHECK(has(validate(bad), WfRule::WF6, "dirty bit write changes the mapping"));
}

TEST_CASE("WF7: co_pa stays within one PA")
{
	auto g = exec_of(R"(elt p
init x -> a
init y -> b
thread 0
  pte0: Wpte x -> c
  I1: invlpg x
  pte2: Wpte y -> d
  I3: invlpg y
exec
  remap pte0 I1
  remap pte2 I3
)");
	CHECK(validate(g).empty());
	g.co_pa.insert(0, 2);
	CHECK(has(validate(g), WfRule::WF7));
}

TEST_CASE("WF8: remap Invlpgs")
{
	auto g = exec_of(R"(elt r
init x -> a
thread 0
  pte0: Wpte x -> b
  I1: invlpg x
thread 1
  R2: R x
  ptw2: ghost ptw R2
exec
  rf_pa init R2
  rf_pa init ptw2
  rf_ptw ptw2 R2
  remap pte0 I1
)");
	CHECK(has(validate(g), WfRule::WF8, "exactly one Invlpg on thread 1"));

	// two PTE writes whose remote Invlpgs precede each other's writes
	auto c = parse_elt(R"(elt cyc
init x -> a
init y -> b
thread 0
  I0: invlpg y
  pte1: Wpte x -> c
  I2: invlpg x
thread 1
  I3: invlpg x
  pte4: Wpte y -> d
  I5: invlpg y
exec
  remap pte1 I2
  remap pte1 I3
  remap pte4 I5
  remap pte4 I0
)",
			   {false});
	CHECK(has(validate_program(c.program), WfRule::WF8, "remap and po form a cycle"));
}

TEST_CASE("WF9: spurious Invlpgs need a later access, under the synthesis filter only")
{
	auto p = parse_elt("elt i\ninit x -> a\nthread 0\n  R0: R x\n  ptw0: ghost ptw R0\n  I1: invlpg x\n", {false})
			 .program;
	CHECK_FALSE(has(validate_program(p), WfRule::WF9));
	CHECK(has(validate_program(p, {true}), WfRule::WF9));
	CHECK(useless_invlpgs(p) == std::vector<EventId>{2});
}

TEST_CASE("WF10: rmw pairs are adjacent same-VA read and write")
{
	auto p = parse_elt(R"(elt m
init x -> a
init y -> b
thread 0
  R0: R x
  ptw0: ghost ptw R0
  W1: W y
  db1: ghost db W1
  ptw1: ghost ptw W1
)",
			   {false})
			 .program;
	CHECK(validate_program(p).empty());
	p.rmw.insert(0, 2);
	CHECK(has(validate_program(p), WfRule::WF10));
}

TEST_CASE("WF12: initial mappings are distinct")
{
	auto p = parse_elt("elt a\ninit x -> a\ninit y -> a\nthread 0\n  R0: R x\n  ptw0: ghost ptw R0\n", {false})
			 .program;
	CHECK(has(validate_program(p), WfRule::WF12));
}

TEST_CASE("WF13: relation endpoints have the right kinds")
{
	auto g = exec_of(stale_walk);
	g.rf.insert(1, 2); // an Invlpg is not a write
	CHECK(has(validate(g), WfRule::WF13, "wrong event kinds"));
	g = exec_of(stale_walk);
	g.co.insert(0, 40);
	CHECK(has(validate(g), WfRule::WF13, "missing event"));
}

TEST_CASE("violations are sorted, deduplicated, and thrown together")
{
	auto g = exec_of(stale_walk);
	g.rf_pa_init = EventSet(g.size());
	g.rf_ptw = Relation(g.size());
	auto v = validate(g);
	CHECK(std::is_sorted(v.begin(), v.end()));
	CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
	CHECK(v.size() >= 2);
	CHECK(rule_name(WfRule::WF11) == "WF11");
	try {
		throw WellFormednessError(v);
	} catch (const WellFormednessError &e) {
		CHECK(e.violations() == v);
		CHECK(std::string(e.what()).find("[WF") != std::string::npos);
	}
}
