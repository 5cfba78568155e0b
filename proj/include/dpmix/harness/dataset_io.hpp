// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <istream>
#include <string>

#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"

namespace dpmix::harness {

// Dataset text format: a header line "trials=J", then one success count per
// line. Blank lines and lines starting with '#' are skipped anywhere in the
// file. Row order is kept.
//
// Errors: io / missing_input when the file cannot be read, parse for a
// malformed header or row, range for a count outside [0, J], empty_input when
// no observation follows the header.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(std::istream& in, const std::string& source = "<stream>");

void write_dataset(const std::string& path, const Dataset& data, const std::string& comment = {});

// FNV-1a over the trials count and the observations, for provenance records.
std::uint64_t dataset_fingerprint(const Dataset& data);

// n draws from the mixture itself: labels from the Polya urn, one atom per
// cluster from the base measure, then Binomial(J, atom) counts.
Dataset simulate_dataset(int n, const ModelSpec& model, RngStream& rng);

}  // namespace dpmix::harness
