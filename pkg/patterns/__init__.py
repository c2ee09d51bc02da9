# Patterns package
