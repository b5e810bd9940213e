#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>

namespace hsim {

enum class HouseholdId : std::uint32_t {};
enum class HouseId : std::uint32_t {};

constexpr std::size_t index_of(HouseholdId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t index_of(HouseId id) { return static_cast<std::size_t>(id); }

enum class PartyKind : std::uint8_t { household, developer, overseas };

/// A market participant: a household agent or one of the two aggregate agents.
struct Party {
    PartyKind kind = PartyKind::developer;
    HouseholdId household{};

    static constexpr Party of(HouseholdId id) { return {PartyKind::household, id}; }
    static constexpr Party developer() { return {PartyKind::developer, HouseholdId{}}; }
    static constexpr Party overseas() { return {PartyKind::overseas, HouseholdId{}}; }

    constexpr bool is_household() const { return kind == PartyKind::household; }

    friend constexpr bool operator==(const Party&, const Party&) = default;
    friend constexpr auto operator<=>(const Party&, const Party&) = default;
};

std::string to_string(const Party& party);

}  // namespace hsim
