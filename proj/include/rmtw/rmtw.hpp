#pragma once

#include "rmtw/errors.hpp"
#include "rmtw/rational.hpp"
#include "rmtw/stream.hpp"
#include "rmtw/real.hpp"
#include "rmtw/interval.hpp"
#include "rmtw/enumeration.hpp"
#include "rmtw/sets.hpp"
#include "rmtw/funcs.hpp"
#include "rmtw/wkl.hpp"
#include "rmtw/construction.hpp"
#include "rmtw/reversal.hpp"
#include "rmtw/diag.hpp"
#include "rmtw/io.hpp"
#include "rmtw/cli.hpp"
