# Tests for dimlift
