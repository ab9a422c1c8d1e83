#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmtw/errors.hpp"
#include "rmtw/rational.hpp"

namespace rmtw {

/// A real coded by a fast-Cauchy sequence: |q_k - q_{k+i}| <= 2^-k.
///
/// The generator is pulled on demand and must be pure. Constant codes skip
/// the prefix check entirely.
class RealCode {
public:
    using Generator = std::function<Rational(std::size_t)>;

    explicit RealCode(Generator gen)
        : gen_(std::make_shared<Generator>(std::move(gen))),
          checked_(std::make_shared<std::atomic<long>>(-1)) {}

    static RealCode constant(Rational q) {
        RealCode r([q](std::size_t) { return q; });
        r.constant_ = std::move(q);
        return r;
    }

    const std::optional<Rational>& constant_value() const { return constant_; }

    /// q_k without any validity check.
    Rational term(std::size_t k) const { return constant_ ? *constant_ : (*gen_)(k); }

    /// Checks |q_j - q_{j+i}| <= 2^-j for all j < j+i <= k.
    void check_prefix(std::size_t k) const {
        if (constant_ || static_cast<long>(k) <= checked_->load()) return;
        std::vector<Rational> q;
        q.reserve(k + 1);
        for (std::size_t j = 0; j <= k; ++j) q.push_back((*gen_)(j));
        for (std::size_t j = 0; j <= k; ++j) {
            Rational bound = Rational::pow2(-static_cast<long>(j));
            for (std::size_t l = j + 1; l <= k; ++l) {
                if ((q[j] - q[l]).abs() > bound)
                    throw Error(ErrorKind::CauchyViolation,
                                "|q_" + std::to_string(j) + " - q_" + std::to_string(l) +
                                    "| = " + (q[j] - q[l]).abs().str() + " > 2^-" +
                                    std::to_string(j));
            }
        }
        long prev = checked_->load();
        while (prev < static_cast<long>(k) &&
               !checked_->compare_exchange_weak(prev, static_cast<long>(k))) {
        }
    }

private:
    std::shared_ptr<Generator> gen_;
    std::shared_ptr<std::atomic<long>> checked_;
    std::optional<Rational> constant_;
};

/// q_k of x, after validating the prefix up to k. The coded real lies in
/// [q_k - 2^-k, q_k + 2^-k].
inline Rational approx(const RealCode& x, std::size_t k) {
    x.check_prefix(k);
    return x.term(k);
}

struct RealEqVerdict {
    bool distinct = false;
    std::size_t witness = 0;  // first k with |q_k - q'_k| > 2^{-k+1}, when distinct
};

/// Sound inequality test up to index k. "Not distinct" is no proof of equality.
inline RealEqVerdict real_eq_at(const RealCode& x, const RealCode& y, std::size_t k) {
    x.check_prefix(k);
    y.check_prefix(k);
    for (std::size_t j = 0; j <= k; ++j) {
        if ((x.term(j) - y.term(j)).abs() > Rational::pow2(1 - static_cast<long>(j)))
            return {true, j};
    }
    return {false, 0};
}

}  // namespace rmtw
