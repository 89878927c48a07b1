#include "aqrm/scan.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace aqrm {

void ScanRow::input(std::string key, double v) { inputs.emplace_back(std::move(key), v); }

void ScanRow::output(std::string key, double v) {
  if (std::isfinite(v)) {
    outputs.emplace_back(std::move(key), v);
  } else {
    warnings.push_back(key + ": non-finite value suppressed");
    outputs.emplace_back(std::move(key), std::monostate{});
  }
}

void ScanRow::output(std::string key, std::optional<double> v, const std::string& why_missing) {
  if (v) {
    output(std::move(key), *v);
  } else {
    warnings.push_back(key + ": " + why_missing);
    outputs.emplace_back(std::move(key), std::monostate{});
  }
}

void ScanRow::output_text(std::string key, std::string v) {
  outputs.emplace_back(std::move(key), std::move(v));
}

void ScanRow::warn(std::string w) { warnings.push_back(std::move(w)); }

std::vector<std::string> ScanRow::columns() const {
  std::vector<std::string> cols;
  for (const auto& [k, v] : inputs) cols.push_back(k);
  for (const auto& [k, v] : outputs) cols.push_back(k);
  if (has_truncation) {
    cols.emplace_back("n_used");
    cols.emplace_back("converged");
  }
  return cols;
}

std::optional<double> ScanRow::number(const std::string& key) const {
  for (const auto* part : {&inputs, &outputs})
    for (const auto& [k, v] : *part)
      if (k == key) {
        if (const double* d = std::get_if<double>(&v)) return *d;
        return std::nullopt;
      }
  if (key == "n_used" && has_truncation) return n_used;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const std::string* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  return {};
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

void check_columns(const std::vector<ScanRow>& rows) {
  if (rows.empty()) return;
  const auto head = rows.front().columns();
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].columns() != head)
      throw std::logic_error("scan row " + std::to_string(i) + " has different columns");
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  check_columns(rows);
  if (rows.empty()) return;
  const auto cols = rows.front().columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    bool first = true;
    auto emit = [&](const std::string& s) {
      os << (first ? "" : ",") << s;
      first = false;
    };
    for (const auto& [k, v] : r.inputs) emit(csv_cell(v));
    for (const auto& [k, v] : r.outputs) emit(csv_cell(v));
    if (r.has_truncation) {
      emit(std::to_string(r.n_used));
      emit(r.converged ? "true" : "false");
    }
    os << '\n';
  }
}

void write_jsonl(std::ostream& os, const std::vector<ScanRow>& rows) {
  check_columns(rows);
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : r.inputs) j[k] = json_cell(v);
    for (const auto& [k, v] : r.outputs) j[k] = json_cell(v);
    if (r.has_truncation) {
      j["n_used"] = r.n_used;
      j["converged"] = r.converged;
    }
    j["warnings"] = r.warnings;
    os << j.dump() << '\n';
  }
}

}  // namespace aqrm
