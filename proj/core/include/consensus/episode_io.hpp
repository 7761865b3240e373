#pragma once

#include <iosfwd>
#include <string>

#include "consensus/harness.hpp"
#include "consensus/metrics.hpp"

namespace consensus {

// One JSON object per timestep followed by one summary object carrying
// "summary": true. Field names are listed in docs/formats.md.
void write_episode_jsonl(std::ostream& os, const EpisodeLog& log, const Summary& summary);
std::string episode_jsonl(const EpisodeLog& log, const Summary& summary);

// Reads the step records and run metadata back. Unknown fields are ignored.
EpisodeLog read_episode_jsonl(std::istream& is);

// The trailing summary object of a log, as a compact JSON string.
std::string read_summary_line(std::istream& is);

}  // namespace consensus
