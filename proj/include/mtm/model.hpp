#pragma once

#include "mtm/derive.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mtm {

class UnresolvedRelation : public std::runtime_error {
public:
	explicit UnresolvedRelation(const std::string &name)
		: std::runtime_error("unknown relation '" + name + "'"), name_(name)
	{}
	const std::string &name() const { return name_; }

private:
	std::string name_;
};

class RelExpr {
public:
	enum class Op : std::uint8_t { Base, Union, Compose, Closure, Inverse };

	static RelExpr base(std::string name);
	static RelExpr unite(RelExpr a, RelExpr b);
	static RelExpr compose(RelExpr a, RelExpr b);
	static RelExpr closure(RelExpr a);
	static RelExpr inverse(RelExpr a);

	Op op() const;
	const std::string &name() const; // Base only
	const RelExpr &lhs() const;
	const RelExpr &rhs() const;

	// Every base relation name the expression mentions.
	void collect_names(std::vector<std::string> &out) const;
	std::string str() const;

private:
	struct Node;
	explicit RelExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	std::shared_ptr<const Node> node_;
};

RelExpr operator|(RelExpr a, RelExpr b);
inline RelExpr rel(std::string name) { return RelExpr::base(std::move(name)); }

struct Acyclic {
	RelExpr expr;
};

struct EmptyIntersect {
	RelExpr lhs;
	RelExpr rhs;
};

struct Axiom {
	std::string name;
	std::variant<Acyclic, EmptyIntersect> assertion;
};

struct Model {
	std::string name;
	std::vector<Axiom> axioms;

	const Axiom *find(std::string_view axiom) const;
	bool mentions(std::string_view relation) const;
	// The model restricted to a prefix or subset of axioms, by name.
	Model only(const std::vector<std::string> &names) const;
};

// Witness: a cycle [e0, ..., e0] for Acyclic, or a single pair for
// EmptyIntersect.
struct Violation {
	std::string axiom;
	std::vector<EventId> witness;

	bool operator==(const Violation &) const = default;
};

struct Verdict {
	bool consistent = true;
	std::vector<Violation> violated;

	bool violates(std::string_view axiom) const;
	std::vector<std::string> violated_names() const;
};

Relation eval_expr(const ExecutionGraph &g, const DerivedRelations &d, const RelExpr &e);

Model x86t_elt();

// Validates, derives, evaluates each axiom.
Verdict check(const ExecutionGraph &g, const Model &m);

// No validation; for restrictions and enumerators that produce well-formed
// graphs by construction.
Verdict check_derived(const ExecutionGraph &g, const DerivedRelations &d, const Model &m);

// Cheaper yes/no variant of check_derived.
bool satisfies(const ExecutionGraph &g, const DerivedRelations &d, const Axiom &a);

} // namespace mtm
