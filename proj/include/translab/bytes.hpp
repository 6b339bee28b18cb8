#pragma once

#include <string>
#include <string_view>

namespace translab {

// Byte payloads (stdin, stdout, file contents) travel through JSON as
// standard base64 so arbitrary bytes round-trip exactly.
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws SchemaError on bad input

std::string to_hex(std::string_view bytes);

}  // namespace translab
