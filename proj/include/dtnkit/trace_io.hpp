#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dtnkit/core.hpp"

namespace dtn {

/// Label <-> dense-id dictionary built while parsing. When every label in a
/// file is already a non-negative decimal integer the labels are taken as the
/// ids verbatim (so writing and re-parsing a trace is the identity); anything
/// else is assigned dense ids in order of first appearance.
struct NodeDictionary {
  std::map<std::string, NodeId> ids;
  std::map<NodeId, std::string> labels;

  NodeId id_of(const std::string& label) const;
  bool empty() const { return ids.empty(); }
};

struct ParseOptions {
  // Downgrade invalid rows (bad duration, a == b) to skips instead of errors.
  bool skip_invalid = false;
};

struct SessionParse {
  std::vector<SessionRecord> records;  // merged, sorted by (node, location, start)
  NodeDictionary nodes;
  std::size_t skipped = 0;
};

struct ContactParse {
  ContactTrace trace;
  NodeDictionary nodes;
  std::size_t skipped = 0;
};

/// Reads `node,location,start,end` rows. Same-node same-location sessions
/// that overlap or touch are merged on ingest.
SessionParse parse_sessions(std::istream& in, const std::string& source = "sessions",
                            const ParseOptions& opts = {});

/// Reads `a,b,start,end` rows; rows may appear unordered and with either pair
/// orientation. Output is canonical.
ContactParse parse_contacts(std::istream& in, const std::string& source = "contacts",
                            const ParseOptions& opts = {});

/// The encounter rule for access-point session logs: two nodes encounter each
/// other while they are online at the same location and their session times
/// intersect with positive measure. Per-pair intervals are then coalesced
/// across locations, so a pair that roams together between locations gets one
/// continuous encounter. Nodes with sessions but no encounters stay in the
/// node set.
ContactTrace sessions_to_encounters(const std::vector<SessionRecord>& sessions);

void write_sessions(const std::vector<SessionRecord>& records, std::ostream& out);
void write_contacts(const ContactTrace& trace, std::ostream& out);

/// `label,id` lines, ordered by id.
void write_node_map(const NodeDictionary& dict, std::ostream& out);

}  // namespace dtn
