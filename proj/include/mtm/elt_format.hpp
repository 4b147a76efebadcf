#pragma once

#include "mtm/graph.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtm {

class ParseError : public std::runtime_error {
public:
	ParseError(std::size_t line, std::size_t column, const std::string &msg);
	std::size_t line() const { return line_; }
	std::size_t column() const { return column_; }

private:
	std::size_t line_, column_;
};

struct Expectation {
	bool forbidden = false;
	std::vector<std::string> axioms;
	bool operator==(const Expectation &) const = default;
};

struct EltDocument {
	std::string name;
	Program program;
	std::optional<ExecutionGraph> exec;
	std::optional<Expectation> expect;
	std::vector<std::string> labels; // per event id, as written in the source
};

struct ParseOptions {
	bool validate = true; // throw WellFormednessError on rule violations
};

// Throws ParseError on syntax errors.
EltDocument parse_elt(std::string_view text, ParseOptions opts = {});
EltDocument read_elt_file(const std::string &path, ParseOptions opts = {});

// Canonical text. Labels are regenerated from print order.
std::string print_elt(const std::string &name, const Program &p, const ExecutionGraph *exec = nullptr,
		      const Expectation *expect = nullptr);
std::string print_elt(const EltDocument &doc);

// Labels print_elt would assign, indexed by event id.
std::vector<std::string> print_labels(const Program &p);

// Default symbol names: x, y, u, w, s, t, then v6, v7, ...; a, b, c, ...
std::string default_va_name(std::size_t i);
std::string default_pa_name(std::size_t i);

} // namespace mtm
