# Tests for persistence-cdga
