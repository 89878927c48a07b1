#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace aqrm {

/// Empty (null), number or text.
using Cell = std::variant<std::monostate, double, std::string>;

/// One record of a parameter sweep. Column order is insertion order: inputs,
/// outputs, then n_used and converged when the row carries truncation data.
struct ScanRow {
  std::vector<std::pair<std::string, Cell>> inputs;
  std::vector<std::pair<std::string, Cell>> outputs;
  int n_used = 0;
  bool converged = true;
  bool has_truncation = true;
  std::vector<std::string> warnings;

  void input(std::string key, double v);
  /// Non-finite values become an empty cell plus a warning naming the column.
  void output(std::string key, double v);
  void output(std::string key, std::optional<double> v, const std::string& why_missing);
  void output_text(std::string key, std::string v);
  void warn(std::string w);

  std::vector<std::string> columns() const;
  std::optional<double> number(const std::string& key) const;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Header plus one line per row. Throws std::logic_error if rows disagree on
/// their columns.
void write_csv(std::ostream& os, const std::vector<ScanRow>& rows);

/// One JSON object per line, keys in column order, plus a "warnings" array.
void write_jsonl(std::ostream& os, const std::vector<ScanRow>& rows);

/// Runs fn(0..count-1) over `workers` threads and returns results in index
/// order. If any call throws, the exception of the lowest failing index is
/// rethrown after all workers finish.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace aqrm
