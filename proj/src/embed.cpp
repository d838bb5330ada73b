#include "phast/types.hpp"
