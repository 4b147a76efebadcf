#include "mtm/synth.hpp"

#include "mtm/elt_format.hpp"
#include "mtm/oracle.hpp"
#include "mtm/relax.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace mtm {

std::size_t SynthResult::count_up_to(std::size_t events) const
{
	return static_cast<std::size_t>(std::count_if(suite.begin(), suite.end(), [&](const SuiteEntry &e) {
		return e.program.size() <= events;
	}));
}

namespace {

using Clock = std::chrono::steady_clock;

// Instructions as the generator sees them before fan-out and walks.
enum class Tk : std::uint8_t { R, W, RMW, PTE, SINV, F };

struct Tok {
	Tk k;
	std::uint32_t va = 0;
};

// A user-facing event in a fully laid out thread.
struct Slot {
	EventKind kind;
	std::uint32_t va = 0;
	std::size_t pte = 0;       // PteWrite: global index; Invlpg: remap source
	bool remap = false;        // Invlpg raised by a PteWrite
	bool walk = false;
	bool rmw_read = false;     // UserRead whose next slot is its rmw write
};

class Generator {
public:
	Generator(const SynthConfig &cfg, const std::function<bool(const Program &)> &emit,
		  const std::atomic<bool> &cancel)
		: emit_(emit), cancel_(cancel), bound_(cfg.bound),
		  max_threads_(cfg.max_threads ? cfg.max_threads : cfg.bound),
		  max_vas_(std::min<std::size_t>(cfg.max_vas ? cfg.max_vas : cfg.bound, 64)),
		  fences_(cfg.enable_fences), rmw_(cfg.rmw_enabled())
	{}

	void run()
	{
		for (T_ = 1; T_ <= max_threads_ && !stop(); ++T_) {
			threads_.assign(T_, {});
			touched_.assign(T_, 0);
			next_va_ = 0;
			extend(0, bound_, 0, 0, false);
		}
	}

private:
	bool stop() const { return stop_ || cancel_.load(std::memory_order_relaxed); }

	std::size_t cost(Tk k) const
	{
		switch (k) {
		case Tk::R: return 1;
		case Tk::W: return 2;
		case Tk::RMW: return 3;
		case Tk::PTE: return 1 + T_;
		case Tk::SINV: return 1;
		case Tk::F: return 1;
		}
		return 0;
	}

	std::size_t min_thread_cost() const { return fences_ ? 1 : 2; }

	// Step 1: local instructions per thread; threads ordered by non-increasing
	// length, VAs numbered by first appearance.
	void extend(std::size_t t, std::size_t cap, std::size_t used, std::size_t walks, bool has_write)
	{
		if (stop())
			return;
		auto &seq = threads_[t];
		if (!seq.empty()) {
			if (t + 1 == T_) {
				if (has_write)
					fan_out_start();
			} else {
				extend(t + 1, seq.size(), used, walks, has_write);
			}
		}
		if (seq.size() == cap)
			return;
		const std::size_t later = (T_ - 1 - t) * min_thread_cost();
		static const Tk kinds[] = {Tk::R, Tk::W, Tk::RMW, Tk::PTE, Tk::SINV, Tk::F};
		for (auto k : kinds) {
			if ((k == Tk::RMW && !rmw_) || (k == Tk::F && !fences_))
				continue;
			const auto va_end = k == Tk::F ? 1u : std::min<std::uint32_t>(next_va_ + 1, static_cast<std::uint32_t>(max_vas_));
			for (std::uint32_t v = 0; v < va_end; ++v) {
				bool data = k == Tk::R || k == Tk::W || k == Tk::RMW;
				bool new_touch = data && !(touched_[t] >> v & 1);
				auto u = used + cost(k);
				auto w = walks + (new_touch ? 1 : 0);
				if (u + w + later > bound_)
					continue;
				auto saved_touch = touched_[t];
				auto saved_next = next_va_;
				if (new_touch)
					touched_[t] |= std::uint64_t{1} << v;
				if (k != Tk::F && v == next_va_)
					++next_va_;
				seq.push_back({k, k == Tk::F ? 0 : v});
				extend(t, cap, u, w, has_write || k == Tk::W || k == Tk::RMW || k == Tk::PTE);
				seq.pop_back();
				touched_[t] = saved_touch;
				next_va_ = saved_next;
				if (stop())
					return;
			}
		}
	}

	// Step 2: place each PteWrite's remote Invlpg on every other thread.
	void fan_out_start()
	{
		// spurious Invlpgs must be observable by a later access on their thread
		for (const auto &seq : threads_)
			for (std::size_t i = 0; i < seq.size(); ++i) {
				if (seq[i].k != Tk::SINV)
					continue;
				bool seen = false;
				for (std::size_t j = i + 1; j < seq.size() && !seen; ++j)
					seen = (seq[j].k == Tk::R || seq[j].k == Tk::W || seq[j].k == Tk::RMW) &&
					       seq[j].va == seq[i].va;
				if (!seen)
					return;
			}
		fixed_cost_ = 0;
		ptes_.clear();
		pte_thread_.clear();
		for (std::size_t t = 0; t < T_; ++t)
			for (const auto &tok : threads_[t]) {
				fixed_cost_ += cost(tok.k);
				if (tok.k == Tk::PTE) {
					ptes_.push_back(tok.va);
					pte_thread_.push_back(t);
				}
			}
		laid_.assign(T_, {});
		fan_out(0);
	}

	void fan_out(std::size_t t)
	{
		if (stop())
			return;
		if (t == T_) {
			walks_start();
			return;
		}
		std::vector<std::size_t> foreign;
		for (std::size_t g = 0; g < ptes_.size(); ++g)
			if (pte_thread_[g] != t)
				foreign.push_back(g);
		std::vector<bool> placed(foreign.size(), false);
		auto &out = laid_[t];
		out.clear();
		std::size_t pte_base = 0;
		for (std::size_t u = 0; u < t; ++u)
			for (const auto &tok : threads_[u])
				pte_base += tok.k == Tk::PTE;
		interleave(t, 0, pte_base, foreign, placed, 0);
	}

	void interleave(std::size_t t, std::size_t li, std::size_t pte_idx, const std::vector<std::size_t> &foreign,
			std::vector<bool> &placed, std::size_t nplaced)
	{
		if (stop())
			return;
		auto &out = laid_[t];
		const auto &seq = threads_[t];
		if (li == seq.size() && nplaced == foreign.size()) {
			fan_out(t + 1);
			return;
		}
		if (li < seq.size()) {
			const auto &tok = seq[li];
			auto mark = out.size();
			auto next_pte = pte_idx;
			switch (tok.k) {
			case Tk::R: out.push_back({EventKind::UserRead, tok.va}); break;
			case Tk::W: out.push_back({EventKind::UserWrite, tok.va}); break;
			case Tk::RMW: {
				Slot r{EventKind::UserRead, tok.va};
				r.rmw_read = true;
				out.push_back(r);
				out.push_back({EventKind::UserWrite, tok.va});
				break;
			}
			case Tk::PTE: {
				Slot p{EventKind::PteWrite, tok.va};
				p.pte = pte_idx;
				Slot i{EventKind::Invlpg, tok.va};
				i.pte = pte_idx;
				i.remap = true;
				out.push_back(p);
				out.push_back(i);
				++next_pte;
				break;
			}
			case Tk::SINV: out.push_back({EventKind::Invlpg, tok.va}); break;
			case Tk::F: out.push_back({EventKind::Fence, 0}); break;
			}
			interleave(t, li + 1, next_pte, foreign, placed, nplaced);
			out.resize(mark);
		}
		for (std::size_t f = 0; f < foreign.size(); ++f) {
			if (placed[f])
				continue;
			placed[f] = true;
			Slot i{EventKind::Invlpg, ptes_[foreign[f]]};
			i.pte = foreign[f];
			i.remap = true;
			out.push_back(i);
			interleave(t, li, pte_idx, foreign, placed, nplaced + 1);
			out.pop_back();
			placed[f] = false;
		}
	}

	// Step 3: walks. A data access needs one when no walk for its VA survives
	// on its thread; otherwise an extra walk is optional (capacity eviction).
	void walks_start()
	{
		flat_.clear();
		for (std::size_t t = 0; t < T_; ++t)
			for (std::size_t i = 0; i < laid_[t].size(); ++i)
				flat_.push_back({t, i});
		choose_walks(0, 0, 0);
	}

	void choose_walks(std::size_t i, std::uint64_t avail, std::size_t walks)
	{
		if (stop())
			return;
		if (fixed_cost_ + walks > bound_)
			return;
		if (i == flat_.size()) {
			targets_.assign(ptes_.size(), Pa{});
			choose_targets(0, 0);
			return;
		}
		auto [t, k] = flat_[i];
		if (k == 0)
			avail = 0;
		auto &s = laid_[t][k];
		const auto bit = std::uint64_t{1} << s.va;
		if (s.kind == EventKind::Invlpg) {
			choose_walks(i + 1, avail & ~bit, walks);
			return;
		}
		if (!is_data(s.kind)) {
			choose_walks(i + 1, avail, walks);
			return;
		}
		if (avail & bit) {
			s.walk = false;
			choose_walks(i + 1, avail, walks);
		}
		s.walk = true;
		choose_walks(i + 1, avail | bit, walks + 1);
		s.walk = false;
	}

	// Step 4: each PteWrite points at another used VA's initial frame or at
	// a fresh frame (numbered by first use).
	void choose_targets(std::size_t g, std::uint32_t fresh)
	{
		if (stop())
			return;
		const auto nva = next_va_;
		if (g == ptes_.size()) {
			build(fresh);
			return;
		}
		for (std::uint32_t u = 0; u < nva; ++u) {
			if (u == ptes_[g])
				continue;
			targets_[g] = Pa{u};
			choose_targets(g + 1, fresh);
		}
		for (std::uint32_t f = 0; f <= fresh; ++f) {
			targets_[g] = Pa{nva + f};
			choose_targets(g + 1, std::max(fresh, f + 1));
		}
	}

	void build(std::uint32_t fresh)
	{
		Program p;
		const auto nva = next_va_;
		for (std::uint32_t v = 0; v < nva; ++v) {
			p.init.push_back(Pa{v});
			p.va_names.push_back(default_va_name(v));
		}
		for (std::uint32_t a = 0; a < nva + fresh; ++a)
			p.pa_names.push_back(default_pa_name(a));

		std::vector<EventId> pte_id(ptes_.size(), 0);
		std::vector<std::pair<std::size_t, EventId>> invs; // (pte, invlpg)
		for (std::size_t t = 0; t < T_; ++t) {
			std::vector<EventId> users;
			std::optional<EventId> pending_rmw;
			for (const auto &s : laid_[t]) {
				auto id = static_cast<EventId>(p.events.size());
				Event e{s.kind, static_cast<ThreadId>(t), Va{s.va}, Pa{}};
				if (s.kind == EventKind::PteWrite) {
					e.target = targets_[s.pte];
					pte_id[s.pte] = id;
				}
				p.events.push_back(e);
				for (auto u : users)
					p.po.insert(u, id);
				users.push_back(id);
				if (s.kind == EventKind::Invlpg && s.remap)
					invs.emplace_back(s.pte, id);
				if (pending_rmw) {
					p.rmw.insert(*pending_rmw, id);
					pending_rmw.reset();
				}
				if (s.rmw_read)
					pending_rmw = id;
				if (s.kind == EventKind::UserWrite) {
					auto db = static_cast<EventId>(p.events.size());
					p.events.push_back({EventKind::DirtyBitWrite, static_cast<ThreadId>(t), Va{s.va}, Pa{}});
					p.ghost.insert(id, db);
				}
				if (s.walk) {
					auto w = static_cast<EventId>(p.events.size());
					p.events.push_back({EventKind::PtWalk, static_cast<ThreadId>(t), Va{s.va}, Pa{}});
					p.ghost.insert(id, w);
				}
			}
		}
		for (auto [g, i] : invs)
			p.remap.insert(pte_id[g], i);
		const auto n = p.size();
		p.po.resize(n);
		p.ghost.resize(n);
		p.remap.resize(n);
		p.rmw.resize(n);
		// an Invlpg placed po-before the PTE write that raised it (through
		// other remaps) is not a program
		if (!is_acyclic(p.po | p.remap))
			return;
		if (!emit_(p))
			stop_ = true;
	}

	const std::function<bool(const Program &)> &emit_;
	const std::atomic<bool> &cancel_;
	std::size_t bound_, max_threads_, max_vas_;
	bool fences_, rmw_;
	bool stop_ = false;

	std::size_t T_ = 0;
	std::vector<std::vector<Tok>> threads_;
	std::vector<std::uint64_t> touched_;
	std::uint32_t next_va_ = 0;
	std::size_t fixed_cost_ = 0;
	std::vector<std::uint32_t> ptes_; // VA per global PteWrite index
	std::vector<std::size_t> pte_thread_;
	std::vector<std::vector<Slot>> laid_;
	std::vector<std::pair<std::size_t, std::size_t>> flat_;
	std::vector<Pa> targets_;
};

void generate(const SynthConfig &cfg, const std::function<bool(const Program &, const std::string &)> &visit,
	      const std::atomic<bool> &cancel)
{
	std::unordered_set<std::string> seen;
	std::function<bool(const Program &)> emit = [&](const Program &p) {
		auto form = canonical_form(p);
		if (!seen.insert(form).second)
			return true;
		return visit(p, form);
	};
	Generator g(cfg, emit, cancel);
	g.run();
}

} // namespace

void for_each_candidate(const SynthConfig &cfg, const std::function<bool(const Program &)> &visit)
{
	std::atomic<bool> cancel{false};
	generate(cfg, [&](const Program &p, const std::string &) { return visit(p); }, cancel);
}

std::optional<ExecutionGraph> find_witness(const Program &p, const Model &m, const std::string &target,
					   bool single_co_pa)
{
	const Axiom *ax = m.find(target);
	if (!ax)
		throw std::invalid_argument("model has no axiom '" + target + "'");
	std::optional<ExecutionGraph> found;
	std::optional<MinimalityChecker> minimal;
	EnumerateOptions opts;
	opts.bound = p.size();
	opts.single_co_pa = single_co_pa;
	enumerate_executions(p, [&](const ExecutionGraph &g) {
		auto d = derive_unchecked(g);
		if (satisfies(g, d, *ax))
			return true;
		if (!minimal)
			minimal.emplace(p, m);
		if (!minimal->minimal(g))
			return true;
		found = g;
		return false;
	}, opts);
	return found;
}

SynthResult synthesize(const SynthConfig &cfg)
{
	if (cfg.bound == 0)
		throw std::invalid_argument("bound must be at least 1");
	if (!cfg.model.find(cfg.target_axiom))
		throw std::invalid_argument("model " + cfg.model.name + " has no axiom '" + cfg.target_axiom + "'");

	const auto start = Clock::now();
	const bool limited = cfg.timeout_seconds > 0;
	const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
					      std::chrono::duration<double>(limited ? cfg.timeout_seconds : 0));
	std::atomic<bool> cancel{false};
	auto expired = [&] {
		if (limited && Clock::now() > deadline)
			cancel = true;
		return cancel.load();
	};

	// Candidates are generated up front (cheap), then checked in parallel.
	std::vector<Program> programs;
	std::vector<std::string> forms;
	generate(cfg, [&](const Program &p, const std::string &form) {
		programs.push_back(p);
		forms.push_back(form);
		return !expired();
	}, cancel);

	const bool single_co_pa = !cfg.model.mentions("co_pa") && !cfg.model.mentions("fr_pa");
	std::vector<std::optional<ExecutionGraph>> witness(programs.size());
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		while (!expired()) {
			auto i = next.fetch_add(1);
			if (i >= programs.size())
				return;
			witness[i] = find_witness(programs[i], cfg.model, cfg.target_axiom, single_co_pa);
		}
	};
	unsigned nworkers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
	std::vector<std::thread> pool;
	for (unsigned w = 1; w < nworkers; ++w)
		pool.emplace_back(worker);
	worker();
	for (auto &t : pool)
		t.join();

	SynthResult res;
	res.candidates = programs.size();
	res.complete = !cancel.load();
	for (std::size_t i = 0; i < programs.size(); ++i)
		if (witness[i])
			res.suite.push_back({std::move(programs[i]), std::move(*witness[i]), std::move(forms[i])});
	std::sort(res.suite.begin(), res.suite.end(), [](const SuiteEntry &a, const SuiteEntry &b) {
		return std::pair(a.program.size(), a.form) < std::pair(b.program.size(), b.form);
	});
	res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
	return res;
}

} // namespace mtm
