#include "patchloc/cli/report.h"

#include <cstdio>
#include <ostream>
#include <string>

namespace patchloc::cli {
namespace {

std::string Hex(BranchId id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx",
                static_cast<unsigned long long>(ToValue(id)));
  return buf;
}

std::string Fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void RenderTable(std::ostream& out, const RankedReport& report) {
  char line[160];
  std::snprintf(line, sizeof line, "%-4s  %-18s  %-9s  %-11s  %-7s  %s\n",
                "rank", "location", "necessity", "sufficiency", "l2",
                "distance");
  out << line;
  for (const RankedEntry& e : report.Top()) {
    std::snprintf(line, sizeof line, "%-4zu  %-18s  %-9s  %-11s  %-7s  %zu\n",
                  e.rank, Hex(e.location).c_str(),
                  Fixed(e.necessity.ToDouble(), 4).c_str(),
                  Fixed(e.sufficiency.ToDouble(), 4).c_str(),
                  Fixed(e.l2, 4).c_str(), e.crash_distance);
    out << line;
  }
  if (report.entries.size() > report.k) {
    out << "(" << report.entries.size() - report.k
        << " more locations not shown)\n";
  }
}

void RenderRecords(std::ostream& out, const RankedReport& report) {
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(report.suite_digest));
  out << "# suite_digest=" << digest << '\n';
  out << "# k=" << report.k << '\n';
  out << "id\tN\tS\tnm_n\tnm_s\tl2\tdistance\trank\n";
  for (const RankedEntry& e : report.entries) {
    out << Hex(e.location) << '\t' << e.necessity.ToString() << '\t'
        << e.sufficiency.ToString() << '\t' << e.nm_necessity.ToString()
        << '\t' << e.nm_sufficiency.ToString() << '\t' << Fixed(e.l2, 6)
        << '\t' << e.crash_distance << '\t' << e.rank << '\n';
  }
}

void RenderBias(std::ostream& out, const BiasReport& report) {
  out << "clusters_t1=" << report.clusters_t1 << '\n'
      << "clusters_t2=" << report.clusters_t2 << '\n'
      << "clusters_t3=" << report.clusters_t3 << '\n'
      << "ratio_t1=" << report.ratio_t1.ToString() << '\n'
      << "ratio_t2=" << report.ratio_t2.ToString() << '\n';
}

}  // namespace patchloc::cli
