#pragma once

#include <cstdint>
#include <compare>

namespace esbsim {

/// Virtual time in integer microseconds since simulation start.
/// All protocol constants are whole microseconds; sub-microsecond on-air
/// arithmetic is done in integer bit counts and rounded up once at the
/// event boundary, so the engine never accumulates rounding error.
struct SimTime {
    std::uint64_t us = 0;

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(std::uint64_t delta_us) const { return {us + delta_us}; }
    constexpr SimTime& operator+=(std::uint64_t delta_us) { us += delta_us; return *this; }

    static constexpr SimTime from_ms(std::uint64_t ms) { return {ms * 1000}; }
    static constexpr SimTime from_s(std::uint64_t s) { return {s * 1000000}; }

    constexpr double as_ms() const { return static_cast<double>(us) / 1000.0; }
    constexpr double as_s() const { return static_cast<double>(us) / 1e6; }
};

} // namespace esbsim
