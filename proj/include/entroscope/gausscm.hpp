#pragma once

#include "entroscope/types.hpp"
