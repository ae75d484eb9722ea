#pragma once

#include <string>
#include <string_view>

#include "qdag/qdag.hpp"

namespace qdag {

inline constexpr int kQDagFormatVersion = 1;

/// Line-oriented text form:
///
///     QDAG 1
///     VAR <name> <k> <val_1> ... <val_k>
///     NODE <id> NUM <decimal>
///     NODE <id> ESN <var> <val>
///     NODE <id> MUL <k> <id_1> ... <id_k>
///     NODE <id> ADD <k> <id_1> ... <id_k>
///     QUERY <var> <val> <id>
///
/// Numbers are written with the shortest digits that read back exactly.
std::string serialize_qdag(const QDag& qdag);

/// Throws ParseError (with line number) on version mismatch, forward or
/// unknown id references, and malformed records.
QDag parse_qdag(std::string_view text);

QDag load_qdag(const std::string& path);
void save_qdag(const QDag& qdag, const std::string& path);

}  // namespace qdag
