# catoni - App Module
