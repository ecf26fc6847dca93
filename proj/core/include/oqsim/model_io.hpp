#pragma once

// Model-file ingestion. Two formats:
//
//  * a JSON document with explicit matrices:
//      {
//        "name": "damped_qubit",
//        "dims": [2],
//        "temperature": "zero",            // or a number: inverse temperature
//        "hamiltonian":  [[..row-major complex entries..]],
//        "couplings":    [{"label": "sx", "matrix": [[..]]}, ...],
//        "spectral_tensor": [{"omega": 1.0, "gamma": [[..]], "S": [[..]]}, ...],
//        "initial_state": [[..]]
//      }
//    Complex entries are [re, im] pairs; a bare number means a real entry.
//    A JSON file may instead reference a builtin:
//      {"builtin": "two_atoms", "params": {"omega0": 1, ...}, "initial": "ee"}
//
//  * a one-line builtin reference:
//      model = two_atoms(omega0=1, gamma=1, gamma12=1, s12=0.2)
//    Greek parameter spellings are accepted for the documented aliases.
//
// Hermiticity, positivity, dimension, and zero-temperature checks all run at
// parse time; violations throw ModelParseError carrying the offending line.

#include <stdexcept>
#include <string>

#include "oqsim/models.hpp"

namespace oqsim {

struct ModelParseError : std::runtime_error {
  int line = 0;  // 1-based; 0 when no location is known
  ModelParseError(const std::string& msg, int line_number = 0);
};

ModelSpec parse_model(const std::string& text);

// Reads the file and delegates to parse_model; the path is prefixed to
// error messages.
ModelSpec load_model(const std::string& path);

}  // namespace oqsim
