#include "support.hpp"

#include "mtm/oracle.hpp"

#include <doctest.h>

#include <filesystem>

using namespace mtm;
using namespace mtm::testing;

TEST_CASE("golden executions get the verdict their files expect")
{
	auto m = x86t_elt();
	std::size_t n = 0;
	for (const auto &entry : std::filesystem::directory_iterator(data_path("golden"))) {
		auto d = read_elt_file(entry.path().string());
		CAPTURE(entry.path().filename().string());
		REQUIRE(d.exec);
		REQUIRE(d.expect);
		auto v = check(*d.exec, m);
		CHECK(v.consistent == !d.expect->forbidden);
		CHECK(v.violated_names() == d.expect->axioms);
		for (const auto &x : v.violated) {
			CHECK(v.violates(x.axiom));
			REQUIRE_FALSE(x.witness.empty());
			if (x.axiom != "rmw_atomicity")
				CHECK(x.witness.front() == x.witness.back());
		}
		++n;
	}
	CHECK(n == 8);
}

TEST_CASE("witness cycles are made of edges of the axiom's relation")
{
	auto m = x86t_elt();
	auto d = load_data("golden/alias_forbidden.elt");
	auto dr = derive(*d.exec);
	auto v = check(*d.exec, m);
	for (const auto &x : v.violated) {
		const auto &ac = std::get<Acyclic>(m.find(x.axiom)->assertion);
		auto r = eval_expr(*d.exec, dr, ac.expr);
		for (std::size_t i = 0; i + 1 < x.witness.size(); ++i)
			CHECK(r.contains(x.witness[i], x.witness[i + 1]));
	}
}

TEST_CASE("expression operators match relation algebra")
{
	auto d = load_data("golden/remote_invlpg.elt");
	const auto &g = *d.exec;
	auto dr = derive(g);
	auto n = g.size();
	auto sized = [n](Relation r) {
		r.resize(n);
		return r;
	};
	auto rf = sized(g.rf), co = sized(g.co);
	CHECK(eval_expr(g, dr, rel("rf") | rel("co")) == (rf | co));
	CHECK(eval_expr(g, dr, RelExpr::compose(rel("rf"), rel("fr"))) == compose(rf, dr.fr));
	CHECK(eval_expr(g, dr, RelExpr::closure(rel("gpo"))) == dr.gpo_plus);
	CHECK(eval_expr(g, dr, RelExpr::inverse(rel("rf"))) == rf.inverse());
	CHECK(eval_expr(g, dr, rel("remap")) == sized(g.program.remap));
	CHECK_THROWS_AS(eval_expr(g, dr, rel("nope")), UnresolvedRelation);

	auto e = RelExpr::compose(rel("a") | rel("b"), RelExpr::closure(RelExpr::inverse(rel("c"))));
	CHECK(e.str() == "((a | b) ; c^-1+)");
	std::vector<std::string> names;
	e.collect_names(names);
	CHECK(names == std::vector<std::string>{"a", "b", "c"});
	CHECK(e.op() == RelExpr::Op::Compose);
	CHECK(e.lhs().op() == RelExpr::Op::Union);
	CHECK(e.rhs().lhs().lhs().name() == "c");
}

TEST_CASE("model lookups and sub-models")
{
	auto m = x86t_elt();
	CHECK(m.axioms.size() == 5);
	REQUIRE(m.find("remap_order"));
	CHECK_FALSE(m.find("nothing"));
	CHECK(m.mentions("ptw_source"));
	CHECK_FALSE(m.mentions("co_pa"));
	CHECK_FALSE(m.mentions("fr_pa"));
	auto sub = m.only({"causality", "sc_per_loc"});
	REQUIRE(sub.axioms.size() == 2);
	CHECK(sub.find("causality"));
	CHECK_FALSE(sub.find("remap_order"));
}

TEST_CASE("satisfies and check agree on every execution")
{
	auto m = x86t_elt();
	for (auto f : {"golden/stale_walk.elt", "golden/remote_stale.elt", "golden/remap_sequence.elt"}) {
		auto p = load_data(f).program;
		for (const auto &g : all_executions(p, {p.size()})) {
			auto d = derive(g);
			auto v = check_derived(g, d, m);
			for (const auto &a : m.axioms)
				CHECK(satisfies(g, d, a) == !v.violates(a.name));
			CHECK(v.consistent == v.violated.empty());
			auto full = check(g, m);
			CHECK(full.violated == v.violated);
		}
	}
}

TEST_CASE("an rmw pair broken by an intervening write")
{
	auto d = parse_elt(R"(elt rmw
init x -> a
thread 0
  R0: R x
  ptw0: ghost ptw R0
  W1: W x
  db1: ghost db W1
rmw R0 W1
thread 1
  W2: W x
  db2: ghost db W2
  ptw2: ghost ptw W2
exec
  rf db2 ptw0
  rf db2 ptw2
  co db2 db1
  co W2 W1
  rf_pa init R0
  rf_pa init ptw0
  rf_pa init W1
  rf_pa init W2
  rf_pa init ptw2
  rf_ptw ptw0 R0
  rf_ptw ptw0 W1
  rf_ptw ptw2 W2
)");
	auto v = check(*d.exec, x86t_elt());
	CHECK(v.violates("rmw_atomicity"));
	auto it = std::find_if(v.violated.begin(), v.violated.end(),
			       [](const Violation &x) { return x.axiom == "rmw_atomicity"; });
	CHECK(it->witness == std::vector<EventId>{0, 2});
}
