#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace causim {

// Binary mask over observation dimensions: bit i set means dimension i is
// treated as a cause of the action.
struct CausalGraph {
  std::vector<std::uint8_t> bits;

  CausalGraph() = default;
  explicit CausalGraph(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  int size() const { return static_cast<int>(bits.size()); }
  bool bit(int i) const { return bits[static_cast<std::size_t>(i)] != 0; }
  int count() const {
    int c = 0;
    for (auto b : bits) c += b != 0;
    return c;
  }

  static CausalGraph all_zeros(int n) { return CausalGraph(std::vector<std::uint8_t>(n, 0)); }
  static CausalGraph all_ones(int n) { return CausalGraph(std::vector<std::uint8_t>(n, 1)); }

  // bits[0] is the least significant bit of the index.
  static CausalGraph from_index(std::uint64_t index, int n) {
    CausalGraph g = all_zeros(n);
    for (int i = 0; i < n; ++i) g.bits[i] = (index >> i) & 1u;
    return g;
  }

  std::uint64_t to_index() const {
    std::uint64_t idx = 0;
    for (int i = 0; i < size(); ++i)
      if (bits[i]) idx |= (1ull << i);
    return idx;
  }

  // "110" reads left to right as bits[0], bits[1], bits[2].
  static CausalGraph from_string(const std::string& s) {
    CausalGraph g;
    g.bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("graph bits must be 0/1: " + s);
      g.bits.push_back(c == '1');
    }
    return g;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
  }

  bool operator==(const CausalGraph& o) const { return bits == o.bits; }
  bool operator!=(const CausalGraph& o) const { return !(*this == o); }
};

}  // namespace causim
