# Test suite for switchgrade
