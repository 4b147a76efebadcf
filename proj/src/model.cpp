#include "mtm/model.hpp"

#include <algorithm>

namespace mtm {

struct RelExpr::Node {
	Op op;
	std::string name;
	std::optional<RelExpr> a, b;
};

RelExpr RelExpr::base(std::string name)
{
	return RelExpr(std::make_shared<const Node>(Node{Op::Base, std::move(name), {}, {}}));
}

RelExpr RelExpr::unite(RelExpr a, RelExpr b)
{
	return RelExpr(std::make_shared<const Node>(Node{Op::Union, {}, std::move(a), std::move(b)}));
}

RelExpr RelExpr::compose(RelExpr a, RelExpr b)
{
	return RelExpr(std::make_shared<const Node>(Node{Op::Compose, {}, std::move(a), std::move(b)}));
}

RelExpr RelExpr::closure(RelExpr a)
{
	return RelExpr(std::make_shared<const Node>(Node{Op::Closure, {}, std::move(a), {}}));
}

RelExpr RelExpr::inverse(RelExpr a)
{
	return RelExpr(std::make_shared<const Node>(Node{Op::Inverse, {}, std::move(a), {}}));
}

RelExpr::Op RelExpr::op() const { return node_->op; }
const std::string &RelExpr::name() const { return node_->name; }
const RelExpr &RelExpr::lhs() const { return *node_->a; }
const RelExpr &RelExpr::rhs() const { return *node_->b; }

RelExpr operator|(RelExpr a, RelExpr b) { return RelExpr::unite(std::move(a), std::move(b)); }

void RelExpr::collect_names(std::vector<std::string> &out) const
{
	switch (op()) {
	case Op::Base:
		out.push_back(name());
		return;
	case Op::Union:
	case Op::Compose:
		lhs().collect_names(out);
		rhs().collect_names(out);
		return;
	case Op::Closure:
	case Op::Inverse:
		lhs().collect_names(out);
		return;
	}
}

std::string RelExpr::str() const
{
	switch (op()) {
	case Op::Base: return name();
	case Op::Union: return "(" + lhs().str() + " | " + rhs().str() + ")";
	case Op::Compose: return "(" + lhs().str() + " ; " + rhs().str() + ")";
	case Op::Closure: return lhs().str() + "+";
	case Op::Inverse: return lhs().str() + "^-1";
	}
	return {};
}

const Axiom *Model::find(std::string_view axiom) const
{
	for (const auto &a : axioms)
		if (a.name == axiom)
			return &a;
	return nullptr;
}

bool Model::mentions(std::string_view relation) const
{
	std::vector<std::string> names;
	for (const auto &a : axioms) {
		if (auto *ac = std::get_if<Acyclic>(&a.assertion)) {
			ac->expr.collect_names(names);
		} else {
			const auto &ei = std::get<EmptyIntersect>(a.assertion);
			ei.lhs.collect_names(names);
			ei.rhs.collect_names(names);
		}
	}
	return std::find(names.begin(), names.end(), relation) != names.end();
}

Model Model::only(const std::vector<std::string> &names) const
{
	Model m{name, {}};
	for (const auto &a : axioms)
		if (std::find(names.begin(), names.end(), a.name) != names.end())
			m.axioms.push_back(a);
	return m;
}

bool Verdict::violates(std::string_view axiom) const
{
	return std::any_of(violated.begin(), violated.end(), [&](const auto &v) { return v.axiom == axiom; });
}

std::vector<std::string> Verdict::violated_names() const
{
	std::vector<std::string> out;
	for (const auto &v : violated)
		out.push_back(v.axiom);
	return out;
}

Relation eval_expr(const ExecutionGraph &g, const DerivedRelations &d, const RelExpr &e)
{
	switch (e.op()) {
	case RelExpr::Op::Base: {
		const auto *r = lookup_relation(g, d, e.name());
		if (!r)
			throw UnresolvedRelation(e.name());
		return *r;
	}
	case RelExpr::Op::Union:
		return eval_expr(g, d, e.lhs()) | eval_expr(g, d, e.rhs());
	case RelExpr::Op::Compose:
		return compose(eval_expr(g, d, e.lhs()), eval_expr(g, d, e.rhs()));
	case RelExpr::Op::Closure:
		return transitive_closure(eval_expr(g, d, e.lhs()));
	case RelExpr::Op::Inverse:
		return eval_expr(g, d, e.lhs()).inverse();
	}
	return {};
}

Model x86t_elt()
{
	return Model{
		"x86t_elt",
		{
			{"sc_per_loc", Acyclic{rel("rf") | rel("co") | rel("fr") | rel("po_loc")}},
			{"rmw_atomicity", EmptyIntersect{RelExpr::compose(rel("fr"), rel("co")), rel("rmw")}},
			{"causality", Acyclic{rel("rfe") | rel("co") | rel("fr") | rel("ppo") | rel("fence")}},
			{"remap_order", Acyclic{rel("fr_va") | RelExpr::closure(rel("gpo")) | rel("remap")}},
			{"tlb_causality", Acyclic{rel("ptw_source") | rel("com")}},
		},
	};
}

namespace {

std::optional<Violation> evaluate(const ExecutionGraph &g, const DerivedRelations &d, const Axiom &a,
				  bool want_witness)
{
	if (const auto *ac = std::get_if<Acyclic>(&a.assertion)) {
		auto r = eval_expr(g, d, ac->expr);
		if (!want_witness)
			return is_acyclic(r) ? std::nullopt : std::optional<Violation>(Violation{a.name, {}});
		if (auto cyc = find_cycle(r))
			return Violation{a.name, std::move(*cyc)};
		return std::nullopt;
	}
	const auto &ei = std::get<EmptyIntersect>(a.assertion);
	auto both = eval_expr(g, d, ei.lhs) & eval_expr(g, d, ei.rhs);
	auto pairs = both.pairs();
	if (pairs.empty())
		return std::nullopt;
	return Violation{a.name, {pairs.front().first, pairs.front().second}};
}

} // namespace

bool satisfies(const ExecutionGraph &g, const DerivedRelations &d, const Axiom &a)
{
	return !evaluate(g, d, a, false);
}

Verdict check_derived(const ExecutionGraph &g, const DerivedRelations &d, const Model &m)
{
	Verdict v;
	for (const auto &a : m.axioms)
		if (auto x = evaluate(g, d, a, true))
			v.violated.push_back(std::move(*x));
	v.consistent = v.violated.empty();
	return v;
}

Verdict check(const ExecutionGraph &g, const Model &m) { return check_derived(g, derive(g), m); }

} // namespace mtm
