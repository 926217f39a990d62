/** @file io.hpp
 * MpsxFile JSON: {"d", "D", "matrices": [[[re,im] x D^2] x d], "boundary": [[re,im] x D^2] | "identity"}.
 */
#ifndef MPSX_IO_HPP
#define MPSX_IO_HPP

#include <string>

#include "mpsx/mpsx_states.hpp"

namespace mpsx {

/// Throws InvalidInput on malformed documents, inconsistent shapes or non-finite entries.
MpsX mpsx_from_json(const std::string& text);
/// Writes "identity" for an identity boundary.
std::string mpsx_to_json(const MpsX& m, int indent = -1);

}  // namespace mpsx

#endif
