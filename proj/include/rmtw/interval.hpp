#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rmtw/errors.hpp"
#include "rmtw/rational.hpp"

namespace rmtw {

enum class Kind { Open, Closed };

/// Rational interval (lo, hi) or [lo, hi] with lo <= hi.
///
/// A closed interval with lo == hi is a point; an open one is empty.
struct Interval {
    Rational lo;
    Rational hi;
    Kind kind = Kind::Open;

    Interval() = default;
    Interval(Rational l, Rational h, Kind k) : lo(std::move(l)), hi(std::move(h)), kind(k) {
        if (hi < lo) throw Error(ErrorKind::Parse, "interval with hi < lo: " + str());
    }

    static Interval open(Rational l, Rational h) { return {std::move(l), std::move(h), Kind::Open}; }
    static Interval closed(Rational l, Rational h) { return {std::move(l), std::move(h), Kind::Closed}; }

    bool is_open() const { return kind == Kind::Open; }
    bool is_closed() const { return kind == Kind::Closed; }
    bool empty() const { return is_open() && lo == hi; }
    bool degenerate() const { return lo == hi; }
    Rational length() const { return hi - lo; }
    Rational mid() const { return midpoint(lo, hi); }

    bool contains(const Rational& x) const {
        return is_open() ? (lo < x && x < hi) : (lo <= x && x <= hi);
    }

    std::string str() const {
        return (is_open() ? "(" : "[") + lo.str() + "," + hi.str() + (is_open() ? ")" : "]");
    }

    /// Parses "(a,b)" or "[a,b]".
    static Interval parse(std::string_view text) {
        std::string s(text);
        if (s.size() < 5) throw Error(ErrorKind::Parse, "malformed interval '" + s + "'");
        Kind k;
        if (s.front() == '(' && s.back() == ')') k = Kind::Open;
        else if (s.front() == '[' && s.back() == ']') k = Kind::Closed;
        else throw Error(ErrorKind::Parse, "malformed interval '" + s + "'");
        auto comma = s.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::Parse, "malformed interval '" + s + "'");
        return Interval(Rational::parse(s.substr(1, comma - 1)),
                        Rational::parse(s.substr(comma + 1, s.size() - comma - 2)), k);
    }

    friend bool operator==(const Interval&, const Interval&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Interval& i) { return os << i.str(); }
};

/// True iff the two intervals share a point.
inline bool intersects(const Interval& a, const Interval& b) {
    if (a.empty() || b.empty()) return false;
    // They share a point unless one ends before the other starts; touching
    // endpoints count only when both sides are closed.
    auto separated = [](const Interval& left, const Interval& right) {
        if (left.hi < right.lo) return true;
        if (left.hi == right.lo) return left.is_open() || right.is_open();
        return false;
    };
    return !separated(a, b) && !separated(b, a);
}

/// Intersection of two intervals of the same kind.
inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    if (a.kind != b.kind) throw Error(ErrorKind::MixedKinds, "intersect " + a.str() + " with " + b.str());
    Rational lo = max(a.lo, b.lo);
    Rational hi = min(a.hi, b.hi);
    if (hi < lo) return std::nullopt;
    Interval r(lo, hi, a.kind);
    if (r.empty()) return std::nullopt;
    return r;
}

/// Distance between two intervals viewed as closed sets (0 if they meet).
inline Rational gap(const Interval& a, const Interval& b) {
    if (a.hi < b.lo) return b.lo - a.hi;
    if (b.hi < a.lo) return a.lo - b.hi;
    return Rational(0);
}

/// Finite union of disjoint intervals of one kind, in a unique normal form.
///
/// Components are sorted by lo. Closed components that touch are merged;
/// open components that merely touch stay separate since their union omits
/// the shared endpoint. Empty open intervals never appear.
class IntervalSet {
public:
    explicit IntervalSet(Kind k = Kind::Open) : kind_(k) {}

    Kind kind() const { return kind_; }
    const std::vector<Interval>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }
    std::size_t size() const { return comps_.size(); }
    const Interval& operator[](std::size_t i) const { return comps_[i]; }
    auto begin() const { return comps_.begin(); }
    auto end() const { return comps_.end(); }

    bool contains(const Rational& x) const {
        auto it = std::upper_bound(comps_.begin(), comps_.end(), x,
                                   [](const Rational& v, const Interval& c) { return v < c.lo; });
        if (it == comps_.begin()) return false;
        return std::prev(it)->contains(x);
    }

    Rational measure() const {
        Rational m(0);
        for (const auto& c : comps_) m += c.length();
        return m;
    }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (i) s += ",";
            s += comps_[i].str();
        }
        return s + "}";
    }

    friend bool operator==(const IntervalSet& a, const IntervalSet& b) {
        // Empty sets compare equal regardless of kind.
        if (a.empty() && b.empty()) return true;
        return a.kind_ == b.kind_ && a.comps_ == b.comps_;
    }
    friend std::ostream& operator<<(std::ostream& os, const IntervalSet& s) { return os << s.str(); }

private:
    friend IntervalSet normalize(std::vector<Interval> raw, Kind default_kind);
    Kind kind_;
    std::vector<Interval> comps_;
};

/// Sorts, merges and drops empties. All inputs must share one kind.
inline IntervalSet normalize(std::vector<Interval> raw, Kind default_kind = Kind::Open) {
    IntervalSet out(raw.empty() ? default_kind : raw.front().kind);
    for (const auto& r : raw)
        if (r.kind != out.kind_)
            throw Error(ErrorKind::MixedKinds, "cannot normalize open and closed intervals together");
    std::erase_if(raw, [](const Interval& i) { return i.empty(); });
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    bool closed = out.kind_ == Kind::Closed;
    for (auto& r : raw) {
        if (!out.comps_.empty()) {
            Interval& last = out.comps_.back();
            bool merge = closed ? r.lo <= last.hi : r.lo < last.hi;
            if (merge) {
                if (last.hi < r.hi) last.hi = r.hi;
                continue;
            }
        }
        out.comps_.push_back(std::move(r));
    }
    return out;
}

inline IntervalSet normalize(const IntervalSet& s) { return normalize(s.components(), s.kind()); }

inline IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.kind() != b.kind()) throw Error(ErrorKind::MixedKinds, "union of open and closed sets");
    std::vector<Interval> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return normalize(std::move(all), a.kind());
}

/// Intersection of two sets of the same kind.
inline IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    if (a.empty() || b.empty()) return IntervalSet(a.empty() ? b.kind() : a.kind());
    if (a.kind() != b.kind()) throw Error(ErrorKind::MixedKinds, "intersection of open and closed sets");
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (auto c = intersect(a[i], b[j])) out.push_back(*c);
        if (a[i].hi < b[j].hi) ++i;
        else ++j;
    }
    return normalize(std::move(out), a.kind());
}

/// Closed set minus open set. Point components survive and are kept.
inline IntervalSet subtract(const IntervalSet& base, const IntervalSet& minus) {
    if (!base.empty() && !base[0].is_closed())
        throw Error(ErrorKind::MixedKinds, "subtract expects a closed base");
    if (!minus.empty() && !minus[0].is_open())
        throw Error(ErrorKind::MixedKinds, "subtract expects open intervals to remove");
    std::vector<Interval> out;
    for (const auto& comp : base) {
        Rational start = comp.lo;
        bool alive = true;
        for (const auto& cut : minus) {
            if (cut.hi <= start) continue;
            if (cut.lo >= comp.hi) break;
            if (cut.lo >= start) out.push_back(Interval::closed(start, cut.lo));
            if (cut.hi > comp.hi) {
                alive = false;
                break;
            }
            start = max(start, cut.hi);
        }
        if (alive && start <= comp.hi) out.push_back(Interval::closed(start, comp.hi));
    }
    return normalize(std::move(out), Kind::Closed);
}

inline IntervalSet subtract(const Interval& base, const IntervalSet& minus) {
    return subtract(normalize({base}, Kind::Closed), minus);
}

/// Open set minus closed set.
inline IntervalSet subtract_closed(const IntervalSet& base, const IntervalSet& minus) {
    if (!base.empty() && !base[0].is_open())
        throw Error(ErrorKind::MixedKinds, "subtract_closed expects an open base");
    if (!minus.empty() && !minus[0].is_closed())
        throw Error(ErrorKind::MixedKinds, "subtract_closed expects closed intervals to remove");
    std::vector<Interval> out;
    for (const auto& comp : base) {
        Rational start = comp.lo;
        bool alive = true;
        for (const auto& cut : minus) {
            if (cut.hi <= start) continue;
            if (cut.lo >= comp.hi) break;
            if (cut.lo > start) out.push_back(Interval::open(start, cut.lo));
            if (cut.hi >= comp.hi) {
                alive = false;
                break;
            }
            start = max(start, cut.hi);
        }
        if (alive && start < comp.hi) out.push_back(Interval::open(start, comp.hi));
    }
    return normalize(std::move(out), Kind::Open);
}

/// True iff every point of `inner` lies in `outer`. Kinds may differ.
inline bool is_subset(const IntervalSet& inner, const IntervalSet& outer) {
    for (const auto& c : inner) {
        if (c.empty()) continue;
        bool ok = false;
        for (const auto& o : outer) {
            bool lo_ok = o.is_closed() || c.is_open() ? o.lo <= c.lo : o.lo < c.lo;
            bool hi_ok = o.is_closed() || c.is_open() ? c.hi <= o.hi : c.hi < o.hi;
            if (lo_ok && hi_ok) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

inline bool is_subset(const Interval& inner, const Interval& outer) {
    return is_subset(normalize({inner}, inner.kind), normalize({outer}, outer.kind));
}

/// True iff some point lies in both sets. Kinds may differ.
inline bool intersects(const IntervalSet& a, const IntervalSet& b) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (intersects(x, y)) return true;
    return false;
}

/// Exact distance from x to a closed set; nullopt when the set is empty.
inline std::optional<Rational> distance(const Rational& x, const IntervalSet& closed_set) {
    std::optional<Rational> best;
    for (const auto& c : closed_set) {
        Rational d = x < c.lo ? c.lo - x : (x > c.hi ? x - c.hi : Rational(0));
        if (!best || d < *best) best = d;
    }
    return best;
}

/// A point of base not covered by opens, or nothing if base is covered.
/// Midpoint of the leftmost nondegenerate remaining component; failing that,
/// the leftmost remaining point.
inline std::optional<Rational> uncovered_point(const Interval& base, const IntervalSet& opens) {
    IntervalSet rest = subtract(base, opens);
    for (const auto& c : rest)
        if (!c.degenerate()) return c.mid();
    if (!rest.empty()) return rest[0].lo;
    return std::nullopt;
}

}  // namespace rmtw
