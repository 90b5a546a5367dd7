#pragma once

#include <limits>
#include <string_view>

namespace qbrel {

enum class Flag {
    ok,
    undefined,      // zero denominator: t = 0, charging turning points
    singular,       // non-finite intermediate
    out_of_regime,  // approximation used outside its validity guard
};

constexpr std::string_view to_string(Flag f) {
    switch (f) {
        case Flag::ok: return "ok";
        case Flag::undefined: return "undef";
        case Flag::singular: return "singular";
        case Flag::out_of_regime: return "out_of_regime";
    }
    return "?";
}

/// A value that may be undefined at isolated points. Undefined values carry
/// +inf so that accidental arithmetic on them is visible.
template <class T>
struct Flagged {
    T value{};
    Flag flag = Flag::ok;

    bool ok() const { return flag == Flag::ok; }

    static Flagged defined(T v) { return {v, Flag::ok}; }
    static Flagged flagged(Flag f) {
        if constexpr (std::numeric_limits<T>::has_infinity) {
            return {std::numeric_limits<T>::infinity(), f};
        } else {
            return {T{}, f};
        }
    }
};

}  // namespace qbrel
