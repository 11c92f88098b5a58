# catoni - Source Module
