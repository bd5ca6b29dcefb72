#ifndef RHC_TESTS_ORACLES_WEIGHTS_ORACLE_HPP_
#define RHC_TESTS_ORACLES_WEIGHTS_ORACLE_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace rhc::oracle {

using BigFloat = boost::multiprecision::cpp_dec_float_50;

// Level weights evaluated with 50 significant decimal digits, rounded to
// double only at the end.
inline std::vector<double> LevelWeightsMp(std::span<const std::size_t> counts) {
  std::vector<BigFloat> logs;
  BigFloat total = 0;
  for (std::size_t k : counts) {
    logs.push_back(boost::multiprecision::log(BigFloat(static_cast<unsigned long long>(k))));
    total += logs.back();
  }
  std::vector<double> out;
  for (const auto& l : logs) out.push_back(static_cast<double>(l / total));
  return out;
}

// Same ratio with base-10 logarithms in plain double precision.
inline std::vector<double> LevelWeightsLog10(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (std::size_t k : counts) total += std::log10(static_cast<double>(k));
  std::vector<double> out;
  for (std::size_t k : counts) out.push_back(std::log10(static_cast<double>(k)) / total);
  return out;
}

}  // namespace rhc::oracle

#endif  // RHC_TESTS_ORACLES_WEIGHTS_ORACLE_HPP_
