#include "emogap/errors.hpp"

namespace emogap {

SchemaError::SchemaError(std::string column)
    : Error("schema error: missing column '" + column + "'"), column_(std::move(column)) {}

RowError::RowError(std::size_t row, std::string column, const std::string& what)
    : Error("row " + std::to_string(row) + (column.empty() ? "" : ", column '" + column + "'") +
            ": " + what),
      row_(row),
      column_(std::move(column)) {}

StageError::StageError(std::string stage, const std::string& cause)
    : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}

}  // namespace emogap
