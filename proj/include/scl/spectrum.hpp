#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "scl/error.hpp"
#include "scl/io.hpp"

namespace scl {

enum class Provenance { oracle, fem };

inline const char* provenance_name(Provenance p) {
  return p == Provenance::oracle ? "oracle" : "fem";
}

/// One computed eigenvalue of the transmission operator.
struct SpectrumRecord {
  double lambda = 0.0;
  int n = 0;             // angular mode
  int multiplicity = 1;  // 1 for n = 0, 2 for n >= 1
  double residual = 0.0; // secular value (bounded form) at the root, or FEM residual
  Provenance provenance = Provenance::oracle;

  int sign_class() const { return lambda > 0.0 ? 1 : (lambda < 0.0 ? -1 : 0); }
};

inline bool spectrum_order(const SpectrumRecord& a, const SpectrumRecord& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  return a.n < b.n;
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRecord>& records) {
  os << "lambda,n,multiplicity,residual,provenance\n";
  for (const auto& rec : records)
    os << format_g17(rec.lambda) << ',' << rec.n << ',' << rec.multiplicity << ','
       << format_g17(rec.residual) << ',' << provenance_name(rec.provenance) << '\n';
}

inline void write_spectrum_csv(const std::string& path, const std::vector<SpectrumRecord>& records) {
  std::ofstream os(path);
  if (!os) raise(errc::numerical_failure, "cannot open " + path + " for writing");
  write_spectrum_csv(os, records);
}

inline std::vector<SpectrumRecord> read_spectrum_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) raise(errc::numerical_failure, "cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<SpectrumRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    SpectrumRecord rec;
    char prov[16] = {0};
    if (std::sscanf(line.c_str(), "%lf,%d,%d,%lf,%15s", &rec.lambda, &rec.n, &rec.multiplicity,
                    &rec.residual, prov) != 5)
      raise(errc::numerical_failure, "malformed spectrum row: " + line);
    rec.provenance = (std::string(prov) == "fem") ? Provenance::fem : Provenance::oracle;
    out.push_back(rec);
  }
  return out;
}

}  // namespace scl
