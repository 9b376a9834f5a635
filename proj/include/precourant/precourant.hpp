#pragma once

#include "runner.hpp"
