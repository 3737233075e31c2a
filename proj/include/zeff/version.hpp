#pragma once

#define ZEFFLAB_VERSION "0.1.0"

namespace zeff {
inline const char* version() { return ZEFFLAB_VERSION; }
}  // namespace zeff
