#ifndef RSC_IO_HPP
#define RSC_IO_HPP

#include <string>

#include "rsc/experiments.hpp"
#include "rsc/mggd_models.hpp"

namespace rsc {

/// One observation per row, no header, '.' decimal separator, 17
/// significant digits.
std::string sampleset_to_csv(const SampleSet& data);
SampleSet sampleset_from_csv(const std::string& text);

SampleSet read_sampleset(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// UCI SONAR file: 208 lines of 60 floats plus a trailing R/M label.
LabeledDataset load_sonar(const std::string& path);

}  // namespace rsc

#endif  // RSC_IO_HPP
