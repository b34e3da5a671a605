#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "maxlab/grid.hpp"

namespace maxlab {

/// Ordered key/value pairs written as `# key=value` lines in CSV output and
/// as a "meta" object in JSON output.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// %.12g
std::string format_number(double v);

/// v rounded to 12 significant digits (nearest double).
double round12(double v);

/// `side` rows of `side` comma-separated values, row y = 0 first. Lines
/// starting with '#' and blank lines are skipped.
Grid2D parse_grid_csv(const std::string& text);

/// {"side": n, "cells": [row-major values]}
Grid2D parse_grid_json(const std::string& text);

/// Dispatches on the extension (.json, otherwise CSV). Throws ParseError if
/// the file cannot be read or parsed.
Grid2D read_grid_file(const std::string& path);

void write_grid_csv(std::ostream& os, const Grid2D& g, const Metadata& meta = {});
std::string grid_to_json(const Grid2D& g, const Metadata& meta = {});

/// Writes CSV or JSON depending on the extension.
void write_grid_file(const std::string& path, const Grid2D& g, const Metadata& meta = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace maxlab
