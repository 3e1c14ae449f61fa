// version.hpp — single source of truth for the library/CLI version string.
#pragma once

#define CAVITYSENSE_VERSION "0.1.0"
