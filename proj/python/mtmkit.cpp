// Python bindings: documents in, plain Python values out.

#include "mtm/canon.hpp"
#include "mtm/elt_format.hpp"
#include "mtm/oracle.hpp"
#include "mtm/relax.hpp"
#include "mtm/synth.hpp"
#include "mtm/wellformed.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mtm;

namespace {

std::string label(const EltDocument &d, EventId e)
{
	return e < d.labels.size() ? d.labels[e] : std::to_string(e);
}

std::vector<std::string> labels(const EltDocument &d, const std::vector<EventId> &ev)
{
	std::vector<std::string> out;
	for (auto e : ev)
		out.push_back(label(d, e));
	return out;
}

const ExecutionGraph &exec_of(const EltDocument &d)
{
	if (!d.exec)
		throw std::invalid_argument("document '" + d.name + "' has no exec block");
	return *d.exec;
}

py::dict verdict(const EltDocument &d)
{
	auto v = check(exec_of(d), x86t_elt());
	py::dict violated;
	for (const auto &x : v.violated)
		violated[py::str(x.axiom)] = labels(d, x.witness);
	py::dict out;
	out["consistent"] = v.consistent;
	out["violated"] = violated;
	return out;
}

py::dict classification(const EltDocument &d, std::size_t bound)
{
	auto c = classify(d.program, x86t_elt(), {bound ? bound : d.program.size()});
	py::dict out;
	out["permitted"] = c.permitted;
	out["forbidden"] = c.forbidden;
	out["per_axiom"] = c.per_axiom;
	return out;
}

py::list violations(const EltDocument &d)
{
	py::list out;
	auto v = d.exec ? validate(*d.exec) : validate_program(d.program);
	for (const auto &x : v)
		out.append(py::make_tuple(rule_name(x.rule), x.message, labels(d, x.events)));
	return out;
}

EltDocument member_doc(const SuiteEntry &e, const std::string &axiom, std::size_t i)
{
	EltDocument d;
	d.name = axiom + "_" + std::to_string(i);
	d.program = e.program;
	d.exec = e.witness;
	d.expect = Expectation{true, {axiom}};
	d.labels = print_labels(e.program);
	return d;
}

py::dict run_synth(const std::string &axiom, std::size_t bound, double timeout, unsigned workers, bool fences,
		   std::optional<bool> rmw)
{
	SynthConfig cfg;
	cfg.target_axiom = axiom;
	cfg.bound = bound;
	cfg.timeout_seconds = timeout;
	cfg.workers = workers;
	cfg.enable_fences = fences;
	cfg.enable_rmw = rmw;
	SynthResult r;
	{
		py::gil_scoped_release nogil;
		r = synthesize(cfg);
	}
	std::vector<EltDocument> docs;
	for (std::size_t i = 0; i < r.suite.size(); ++i)
		docs.push_back(member_doc(r.suite[i], axiom, i));
	py::dict out;
	out["suite"] = docs;
	out["complete"] = r.complete;
	out["seconds"] = r.seconds;
	out["candidates"] = r.candidates;
	return out;
}

py::dict run_compare(const EltDocument &t, const std::vector<EltDocument> &suite)
{
	std::vector<Program> progs;
	for (const auto &d : suite)
		progs.push_back(d.program);
	auto c = compare(t.program, progs);
	py::dict out;
	switch (c.kind) {
	case CompareResult::Kind::Verbatim: out["kind"] = "verbatim"; break;
	case CompareResult::Kind::ReducibleTo: out["kind"] = "reducible"; break;
	case CompareResult::Kind::NotCovered: out["kind"] = "not-covered"; break;
	}
	out["match"] = c.kind == CompareResult::Kind::NotCovered ? py::none() : py::cast(c.match);
	std::vector<std::string> removed;
	for (const auto &u : c.removed)
		removed.push_back(describe(u, t.labels));
	out["removed"] = removed;
	return out;
}

} // namespace

PYBIND11_MODULE(mtmkit, m)
{
	m.doc() = "Transistency litmus tests: parse, check, enumerate, synthesize, compare.";

	static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
	static py::exception<WellFormednessError> wf_error(m, "WellFormednessError", PyExc_ValueError);
	py::register_exception_translator([](std::exception_ptr p) {
		try {
			if (p)
				std::rethrow_exception(p);
		} catch (const ParseError &e) {
			py::set_error(parse_error, e.what());
		} catch (const WellFormednessError &e) {
			py::set_error(wf_error, e.what());
		} catch (const BoundExceeded &e) {
			PyErr_SetString(PyExc_OverflowError, e.what());
		}
	});

	py::class_<EltDocument>(m, "Document")
		.def_readonly("name", &EltDocument::name)
		.def_readonly("labels", &EltDocument::labels)
		.def_property_readonly("size", [](const EltDocument &d) { return d.program.size(); })
		.def_property_readonly("has_exec", [](const EltDocument &d) { return d.exec.has_value(); })
		.def_property_readonly("expect",
				       [](const EltDocument &d) -> py::object {
					       if (!d.expect)
						       return py::none();
					       return py::make_tuple(d.expect->forbidden ? "forbidden" : "permitted",
								     d.expect->axioms);
				       })
		.def("text", [](const EltDocument &d) { return print_elt(d); })
		.def("__repr__", [](const EltDocument &d) {
			return "<Document " + d.name + ", " + std::to_string(d.program.size()) + " events>";
		});

	m.def("parse", [](const std::string &text, bool validate) { return parse_elt(text, {validate}); },
	      py::arg("text"), py::arg("validate") = true);
	m.def("read", [](const std::string &path, bool validate) { return read_elt_file(path, {validate}); },
	      py::arg("path"), py::arg("validate") = true);
	m.def("axioms", [] {
		std::vector<std::string> out;
		for (const auto &a : x86t_elt().axioms)
			out.push_back(a.name);
		return out;
	});
	m.def("check", &verdict, py::arg("doc"), "Verdict of the document's execution.");
	m.def("validate", &violations, py::arg("doc"), "Well-formedness violations as (rule, message, labels).");
	m.def("classify", &classification, py::arg("doc"), py::arg("bound") = 0,
	      "Counts of permitted and forbidden executions of the program.");
	m.def("is_minimal", [](const EltDocument &d) { return is_minimal(exec_of(d), x86t_elt()); }, py::arg("doc"));
	m.def("canonical_form", [](const EltDocument &d) { return canonical_form(d.program); }, py::arg("doc"));
	m.def("synthesize", &run_synth, py::arg("axiom"), py::arg("bound"), py::arg("timeout") = 0.0,
	      py::arg("workers") = 0, py::arg("fences") = false, py::arg("rmw") = py::none());
	m.def("compare", &run_compare, py::arg("test"), py::arg("suite"));
	m.def("screen",
	      [](const EltDocument &d, bool semantic) {
		      auto model = x86t_elt();
		      return screen(d.program, semantic ? &model : nullptr);
	      },
	      py::arg("doc"), py::arg("semantic") = false);
}
