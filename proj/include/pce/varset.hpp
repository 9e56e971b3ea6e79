#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

namespace pce {

/// A set of query variables, stored as a bitmask over variable indices.
/// Queries are limited to 32 variables; every exponential algorithm here caps
/// far below that.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr VarSet single(int var) { return VarSet(std::uint32_t{1} << var); }
  static constexpr VarSet first(int n) {
    return VarSet(n >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1);
  }
  static VarSet of(const std::vector<int>& vars) {
    VarSet s;
    for (int v : vars) s = s.with(v);
    return s;
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int var) const { return (bits_ >> var) & 1u; }
  constexpr bool subset_of(VarSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr VarSet with(int var) const { return VarSet(bits_ | (std::uint32_t{1} << var)); }
  constexpr VarSet without(int var) const { return VarSet(bits_ & ~(std::uint32_t{1} << var)); }

  friend constexpr VarSet operator|(VarSet a, VarSet b) { return VarSet(a.bits_ | b.bits_); }
  friend constexpr VarSet operator&(VarSet a, VarSet b) { return VarSet(a.bits_ & b.bits_); }
  friend constexpr VarSet operator-(VarSet a, VarSet b) { return VarSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(VarSet, VarSet) = default;
  friend constexpr auto operator<=>(VarSet, VarSet) = default;

  /// Member indices in increasing order.
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace pce

template <>
struct std::hash<pce::VarSet> {
  std::size_t operator()(pce::VarSet s) const noexcept { return std::hash<std::uint32_t>{}(s.bits()); }
};
