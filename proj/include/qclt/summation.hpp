#pragma once

#include <cstddef>
#include <span>

namespace qclt {

/// Pairwise (tree) summation with a fixed split rule, so the result depends
/// only on the input order.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    T acc{};
    for (const T& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename Container>
auto pairwise_sum(const Container& c) {
  using T = typename Container::value_type;
  return pairwise_sum(std::span<const T>(c.data(), c.size()));
}

}  // namespace qclt
