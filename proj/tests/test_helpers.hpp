#pragma once

#include <cstdlib>
#include <string>

inline std::string data_path(const char* file) {
  const char* root = std::getenv("REGCOMP_SOURCE_DIR");
  return std::string(root ? root : REGCOMP_SOURCE_DIR_DEFAULT) + "/data/" + file;
}
