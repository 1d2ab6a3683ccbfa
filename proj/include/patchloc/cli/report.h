#ifndef PATCHLOC_CLI_REPORT_H_
#define PATCHLOC_CLI_REPORT_H_

#include <iosfwd>

#include "patchloc/bias.h"
#include "patchloc/ranker.h"

namespace patchloc::cli {

// Aligned table of the Top-K entries for people.
void RenderTable(std::ostream& out, const RankedReport& report);

// Machine-readable form of the full ranking: two "# key=value" header lines
// followed by a tab-separated header and one row per location
//   id N S nm_n nm_s l2 distance rank
// Scores are exact fractions; l2 is printed with 6 decimals.
void RenderRecords(std::ostream& out, const RankedReport& report);

// "key=value" lines.
void RenderBias(std::ostream& out, const BiasReport& report);

}  // namespace patchloc::cli

#endif  // PATCHLOC_CLI_REPORT_H_
