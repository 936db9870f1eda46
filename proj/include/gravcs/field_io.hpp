#pragma once

// Flat binary snapshots of form fields, used by the CLI --out dumps and by
// tests for round-trip checks.  Little-endian float64 payload after a small
// header; the magic is "GCSF".

#include <string>

#include "gravcs/form.hpp"

namespace gravcs {

void write_field(const std::string& path, const FormField& f);
void write_field(const std::string& path, const MatrixFormField& f);

FormField read_scalar_field(const std::string& path);
MatrixFormField read_matrix_field(const std::string& path);

}  // namespace gravcs
