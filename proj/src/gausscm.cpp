#include "entroscope/gausscm.hpp"
