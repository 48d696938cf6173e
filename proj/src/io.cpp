#include "entroscope/io.hpp"
