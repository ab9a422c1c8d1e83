#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace rmtw {

/// Pull-based, position-indexed enumeration.
///
/// Position i either carries an item or is empty (the enumeration emitted
/// nothing at that step). Generators must be pure. A stream may declare a
/// finite length, past which every position is empty.
template <class T>
class Stream {
public:
    using Generator = std::function<std::optional<T>(std::size_t)>;

    Stream() : Stream(std::vector<T>{}) {}

    explicit Stream(Generator gen, std::optional<std::size_t> length = std::nullopt)
        : gen_(std::make_shared<Generator>(std::move(gen))), length_(length) {}

    explicit Stream(std::vector<T> items) {
        auto data = std::make_shared<const std::vector<T>>(std::move(items));
        length_ = data->size();
        gen_ = std::make_shared<Generator>([data](std::size_t i) -> std::optional<T> {
            if (i >= data->size()) return std::nullopt;
            return (*data)[i];
        });
    }

    std::optional<T> at(std::size_t i) const {
        if (length_ && i >= *length_) return std::nullopt;
        return (*gen_)(i);
    }

    std::optional<std::size_t> length() const { return length_; }

    /// Items at positions < n, in order, empties skipped.
    std::vector<T> prefix(std::size_t n) const {
        if (length_ && n > *length_) n = *length_;
        std::vector<T> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (auto v = at(i)) out.push_back(std::move(*v));
        return out;
    }

    /// Items at positions <= stage paired with their position.
    std::vector<std::pair<std::size_t, T>> indexed_prefix(std::size_t stage) const {
        std::vector<std::pair<std::size_t, T>> out;
        std::size_t n = stage + 1;
        if (length_ && n > *length_) n = *length_;
        for (std::size_t i = 0; i < n; ++i)
            if (auto v = at(i)) out.emplace_back(i, std::move(*v));
        return out;
    }

    template <class F>
    auto map(F f) const -> Stream<decltype(f(std::declval<const T&>()))> {
        using U = decltype(f(std::declval<const T&>()));
        auto gen = gen_;
        auto len = length_;
        return Stream<U>(
            [gen, len, f](std::size_t i) -> std::optional<U> {
                if (len && i >= *len) return std::nullopt;
                auto v = (*gen)(i);
                if (!v) return std::nullopt;
                return f(*v);
            },
            length_);
    }

    /// Like map, but f may drop an item by returning nullopt.
    template <class F>
    auto filter_map(F f) const
        -> Stream<typename decltype(f(std::declval<const T&>()))::value_type> {
        using U = typename decltype(f(std::declval<const T&>()))::value_type;
        auto gen = gen_;
        auto len = length_;
        return Stream<U>(
            [gen, len, f](std::size_t i) -> std::optional<U> {
                if (len && i >= *len) return std::nullopt;
                auto v = (*gen)(i);
                if (!v) return std::nullopt;
                return f(*v);
            },
            length_);
    }

private:
    std::shared_ptr<Generator> gen_;
    std::optional<std::size_t> length_;
};

}  // namespace rmtw
