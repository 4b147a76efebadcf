#include "mtm/relation.hpp"

#include <algorithm>
#include <bit>

namespace mtm {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

} // namespace

/* EventSet */

EventSet::EventSet(std::size_t universe) : n_(universe), words_(words_for(universe), 0) {}

EventSet::EventSet(std::initializer_list<EventId> ids)
{
	for (auto e : ids)
		insert(e);
}

EventSet EventSet::all(std::size_t universe)
{
	EventSet s(universe);
	for (std::size_t i = 0; i < universe; ++i)
		s.insert(static_cast<EventId>(i));
	return s;
}

void EventSet::grow(std::size_t n)
{
	if (n <= n_)
		return;
	n_ = n;
	words_.resize(words_for(n), 0);
}

void EventSet::insert(EventId e)
{
	grow(static_cast<std::size_t>(e) + 1);
	words_[e / 64] |= std::uint64_t{1} << (e % 64);
}

void EventSet::erase(EventId e)
{
	if (e < n_)
		words_[e / 64] &= ~(std::uint64_t{1} << (e % 64));
}

bool EventSet::contains(EventId e) const
{
	return e < n_ && (words_[e / 64] >> (e % 64)) & 1;
}

std::size_t EventSet::size() const
{
	std::size_t c = 0;
	for (auto w : words_)
		c += static_cast<std::size_t>(std::popcount(w));
	return c;
}

bool EventSet::empty() const
{
	return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

std::vector<EventId> EventSet::elements() const
{
	std::vector<EventId> out;
	for_each([&](EventId e) { out.push_back(e); });
	return out;
}

EventSet &EventSet::operator|=(const EventSet &o)
{
	grow(o.n_);
	for (std::size_t i = 0; i < o.words_.size(); ++i)
		words_[i] |= o.words_[i];
	return *this;
}

EventSet &EventSet::operator&=(const EventSet &o)
{
	for (std::size_t i = 0; i < words_.size(); ++i)
		words_[i] &= i < o.words_.size() ? o.words_[i] : 0;
	return *this;
}

EventSet &EventSet::operator-=(const EventSet &o)
{
	for (std::size_t i = 0; i < words_.size() && i < o.words_.size(); ++i)
		words_[i] &= ~o.words_[i];
	return *this;
}

bool EventSet::operator==(const EventSet &o) const
{
	auto m = std::max(words_.size(), o.words_.size());
	for (std::size_t i = 0; i < m; ++i) {
		auto a = i < words_.size() ? words_[i] : 0;
		auto b = i < o.words_.size() ? o.words_[i] : 0;
		if (a != b)
			return false;
	}
	return true;
}

/* Relation */

Relation::Relation(std::size_t universe)
	: n_(universe), w_(words_for(universe)), bits_(n_ * w_, 0)
{}

Relation::Relation(std::initializer_list<EventPair> pairs)
{
	for (const auto &p : pairs)
		insert(p);
}

void Relation::resize(std::size_t universe)
{
	if (universe <= n_)
		return;
	auto nw = words_for(universe);
	std::vector<std::uint64_t> nb(universe * nw, 0);
	for (std::size_t a = 0; a < n_; ++a)
		std::copy_n(row(a), w_, &nb[a * nw]);
	n_ = universe;
	w_ = nw;
	bits_ = std::move(nb);
}

void Relation::clear() { std::fill(bits_.begin(), bits_.end(), 0); }

void Relation::insert(EventId a, EventId b)
{
	resize(std::max<std::size_t>({n_, std::size_t{a} + 1, std::size_t{b} + 1}));
	row(a)[b / 64] |= std::uint64_t{1} << (b % 64);
}

void Relation::erase(EventId a, EventId b)
{
	if (a < n_ && b < n_)
		row(a)[b / 64] &= ~(std::uint64_t{1} << (b % 64));
}

bool Relation::contains(EventId a, EventId b) const
{
	return a < n_ && b < n_ && (row(a)[b / 64] >> (b % 64)) & 1;
}

bool Relation::empty() const
{
	return std::all_of(bits_.begin(), bits_.end(), [](auto w) { return w == 0; });
}

std::size_t Relation::size() const
{
	std::size_t c = 0;
	for (auto w : bits_)
		c += static_cast<std::size_t>(std::popcount(w));
	return c;
}

std::vector<EventPair> Relation::pairs() const
{
	std::vector<EventPair> out;
	for_each([&](EventId a, EventId b) { out.emplace_back(a, b); });
	return out;
}

EventSet Relation::successors(EventId a) const
{
	EventSet s(n_);
	if (a >= n_)
		return s;
	for (std::size_t b = 0; b < n_; ++b)
		if ((row(a)[b / 64] >> (b % 64)) & 1)
			s.insert(static_cast<EventId>(b));
	return s;
}

EventSet Relation::predecessors(EventId b) const
{
	EventSet s(n_);
	for (std::size_t a = 0; a < n_; ++a)
		if (contains(static_cast<EventId>(a), b))
			s.insert(static_cast<EventId>(a));
	return s;
}

EventSet Relation::domain() const
{
	EventSet s(n_);
	for (std::size_t a = 0; a < n_; ++a)
		if (!row_empty(static_cast<EventId>(a)))
			s.insert(static_cast<EventId>(a));
	return s;
}

EventSet Relation::range() const
{
	EventSet s(n_);
	for_each([&](EventId, EventId b) { s.insert(b); });
	return s;
}

bool Relation::row_empty(EventId a) const
{
	if (a >= n_)
		return true;
	const auto *r = row(a);
	return std::all_of(r, r + w_, [](auto w) { return w == 0; });
}

Relation Relation::inverse() const
{
	Relation r(n_);
	for_each([&](EventId a, EventId b) { r.insert(b, a); });
	return r;
}

Relation Relation::restrict(const EventSet &keep) const { return restrict(keep, keep); }

Relation Relation::restrict(const EventSet &from, const EventSet &to) const
{
	Relation r(n_);
	for_each([&](EventId a, EventId b) {
		if (from.contains(a) && to.contains(b))
			r.insert(a, b);
	});
	return r;
}

Relation &Relation::operator|=(const Relation &o)
{
	resize(o.n_);
	for (std::size_t a = 0; a < o.n_; ++a)
		for (std::size_t w = 0; w < o.w_; ++w)
			row(a)[w] |= o.row(a)[w];
	return *this;
}

Relation &Relation::operator&=(const Relation &o)
{
	for (std::size_t a = 0; a < n_; ++a)
		for (std::size_t w = 0; w < w_; ++w)
			row(a)[w] &= (a < o.n_ && w < o.w_) ? o.row(a)[w] : 0;
	return *this;
}

Relation &Relation::operator-=(const Relation &o)
{
	for (std::size_t a = 0; a < n_ && a < o.n_; ++a)
		for (std::size_t w = 0; w < w_ && w < o.w_; ++w)
			row(a)[w] &= ~o.row(a)[w];
	return *this;
}

bool Relation::operator==(const Relation &o) const
{
	auto n = std::max(n_, o.n_);
	auto wmax = words_for(n);
	for (std::size_t a = 0; a < n; ++a)
		for (std::size_t w = 0; w < wmax; ++w) {
			auto x = (a < n_ && w < w_) ? row(a)[w] : 0;
			auto y = (a < o.n_ && w < o.w_) ? o.row(a)[w] : 0;
			if (x != y)
				return false;
		}
	return true;
}

Relation operator|(Relation a, const Relation &b) { return a |= b; }
Relation operator&(Relation a, const Relation &b) { return a &= b; }
Relation operator-(Relation a, const Relation &b) { return a -= b; }

Relation compose(const Relation &a, const Relation &b)
{
	auto n = std::max(a.n_, b.n_);
	Relation bb = b;
	bb.resize(n);
	Relation out(n);
	for (std::size_t x = 0; x < a.n_; ++x) {
		auto *dst = out.row(x);
		const auto *src = a.row(x);
		for (std::size_t w = 0; w < a.w_; ++w) {
			auto bits = src[w];
			while (bits) {
				auto y = w * 64 + static_cast<unsigned>(__builtin_ctzll(bits));
				bits &= bits - 1;
				const auto *by = bb.row(y);
				for (std::size_t k = 0; k < out.w_; ++k)
					dst[k] |= by[k];
			}
		}
	}
	return out;
}

Relation transitive_closure(const Relation &r)
{
	Relation c = r;
	for (std::size_t k = 0; k < c.n_; ++k) {
		const auto kw = k / 64;
		const auto kb = std::uint64_t{1} << (k % 64);
		for (std::size_t i = 0; i < c.n_; ++i) {
			auto *ri = c.row(i);
			if (!(ri[kw] & kb))
				continue;
			const auto *rk = c.row(k);
			for (std::size_t w = 0; w < c.w_; ++w)
				ri[w] |= rk[w];
		}
	}
	return c;
}

bool is_acyclic(const Relation &r)
{
	// Kahn's algorithm on in-degrees.
	const auto n = r.n_;
	std::vector<std::uint32_t> indeg(n, 0);
	r.for_each([&](EventId, EventId b) { ++indeg[b]; });
	std::vector<EventId> stack;
	for (std::size_t i = 0; i < n; ++i)
		if (!indeg[i])
			stack.push_back(static_cast<EventId>(i));
	std::size_t seen = 0;
	while (!stack.empty()) {
		auto a = stack.back();
		stack.pop_back();
		++seen;
		const auto *src = r.row(a);
		for (std::size_t w = 0; w < r.w_; ++w) {
			auto bits = src[w];
			while (bits) {
				auto b = w * 64 + static_cast<unsigned>(__builtin_ctzll(bits));
				bits &= bits - 1;
				if (--indeg[b] == 0)
					stack.push_back(static_cast<EventId>(b));
			}
		}
	}
	return seen == n;
}

std::optional<std::vector<EventId>> find_cycle(const Relation &r)
{
	const auto n = r.n_;
	std::optional<std::vector<EventId>> best;
	std::vector<std::int64_t> parent(n);
	std::vector<EventId> queue;
	for (std::size_t s = 0; s < n; ++s) {
		// BFS from s through nodes >= s, neighbours in ascending order, so the
		// first path found back to s is the least shortest one.
		std::fill(parent.begin(), parent.end(), -1);
		queue.assign(1, static_cast<EventId>(s));
		std::optional<EventId> last;
		for (std::size_t qi = 0; qi < queue.size() && !last; ++qi) {
			auto a = queue[qi];
			for (std::size_t b = s; b < n; ++b) {
				if (!r.contains(a, static_cast<EventId>(b)))
					continue;
				if (b == s) {
					last = a;
					break;
				}
				if (parent[b] != -1)
					continue;
				parent[b] = a;
				queue.push_back(static_cast<EventId>(b));
			}
		}
		if (!last)
			continue;
		std::vector<EventId> path;
		for (auto x = static_cast<std::int64_t>(*last); x != static_cast<std::int64_t>(s);
		     x = parent[static_cast<std::size_t>(x)])
			path.push_back(static_cast<EventId>(x));
		path.push_back(static_cast<EventId>(s));
		std::reverse(path.begin(), path.end());
		path.push_back(static_cast<EventId>(s));
		if (!best || path.size() < best->size())
			best = std::move(path);
		if (best->size() == 2)
			break;
	}
	return best;
}

} // namespace mtm
